#include "rankspectra/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

// Nodes/weights on [-1, 1], computed by Newton iteration on P_n using the
// three-term recurrence. Roots are symmetric so only half are solved.
QuadratureRule reference_rule(std::size_t order) {
    QuadratureRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    const auto n = static_cast<double>(order);
    const std::size_t half = (order + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= order; ++k) {
                const auto kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        // recompute derivative at the converged root
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= order; ++k) {
            const auto kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

const QuadratureRule& cached_reference(std::size_t order) {
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, reference_rule(order)).first;
    }
    return it->second;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t order, double lower, double upper) {
    if (order == 0) {
        throw DomainError("gauss_legendre: order must be positive");
    }
    if (!(upper > lower)) {
        throw DomainError("gauss_legendre: need upper > lower");
    }
    const QuadratureRule& ref = cached_reference(order);
    const double half_width = 0.5 * (upper - lower);
    const double mid = 0.5 * (upper + lower);
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
        rule.nodes[i] = mid + half_width * ref.nodes[i];
        rule.weights[i] = half_width * ref.weights[i];
    }
    return rule;
}

}  // namespace rankspectra
