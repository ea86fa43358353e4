#include "rankspectra/rmt_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

constexpr int kMaxDoublings = 60;
constexpr int kMaxBisections = 400;
constexpr double kPsiPrimeTol = 1e-12;
constexpr double kOmega = 0.5;
constexpr double kStieltjesTol = 1e-12;
constexpr int kStieltjesMaxIter = 50000;
constexpr double kMomentTol = 1e-15;
constexpr int kMomentMaxIter = 200;

void check_domain(const MPModel& model, double lam) {
    const auto& H = model.H();
    const double guard = 1e-10 * std::max(H.support_upper(), std::numeric_limits<double>::min());
    if (!std::isfinite(lam) || (lam > H.support_lower() - guard && lam < H.support_upper() + guard)) {
        throw DomainError("psi: lambda = " + std::to_string(lam) + " lies on or too close to the support of H");
    }
}

// Bisection for the sign change of an increasing function on [lo, hi].
double bisect_increasing(const MPModel& model, double lo, double hi) {
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double v = psi_prime(model, mid);
        if (std::abs(v) < kPsiPrimeTol) {
            return mid;
        }
        (v < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Same for a decreasing function.
double bisect_decreasing(const MPModel& model, double lo, double hi) {
    for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double v = psi_prime(model, mid);
        if (std::abs(v) < kPsiPrimeTol) {
            return mid;
        }
        (v > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// m(z) = int t / (z - t) dF = -1 - z s(z) for real z above the support.
// m solves F(m) = int t a / (z - t a) dH - m = 0 with a = 1 + c m. F is
// convex and decreasing left of its first root, so Newton from m = mu / z
// increases monotonically to the root on the right branch.
double edge_moment(const MPModel& model, double z) {
    const auto t = model.H().locations();
    const auto w = model.H().weights();
    const double c = model.c();
    double m = model.H().mean() / z;
    for (int it = 0; it < kMomentMaxIter; ++it) {
        const double a = 1.0 + c * m;
        double f = -m;
        double df = -1.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = z - t[i] * a;
            f += w[i] * t[i] * a / d;
            df += w[i] * c * t[i] * z / (d * d);
        }
        const double step = -f / df;
        m += step;
        if (!(step > kMomentTol * m)) {
            return m;
        }
    }
    throw ConvergenceError("kappa: no convergence at z = " + std::to_string(z));
}

double kappa_direct(const MPModel& model, double z, double mu) {
    return model.c() * (z / mu - 1.0) * edge_moment(model, z);
}

}  // namespace

MPModel::MPModel(double c, SpectralDistribution H) : c_(c), H_(std::move(H)) {
    if (!std::isfinite(c_) || c_ <= 0.0) {
        throw DomainError("MPModel: c must be finite and positive");
    }
}

double mean_h(const SpectralDistribution& H) noexcept { return H.mean(); }

double psi(const MPModel& model, double lam) {
    check_domain(model, lam);
    const auto t = model.H().locations();
    const auto w = model.H().weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        acc += w[i] * t[i] / (lam - t[i]);
    }
    return lam * (1.0 + model.c() * acc);
}

double psi_prime(const MPModel& model, double lam) {
    check_domain(model, lam);
    const auto t = model.H().locations();
    const auto w = model.H().weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = t[i] / (lam - t[i]);
        acc += w[i] * r * r;
    }
    return 1.0 - model.c() * acc;
}

EdgeResult upper_edge(const MPModel& model) {
    const double top = model.H().support_upper();
    if (!(top > 0.0)) {
        throw DomainError("upper_edge: H is concentrated at zero");
    }
    EdgeResult r;
    r.side = EdgeSide::upper;
    const double lo = top * (1.0 + 1e-8);
    if (psi_prime(model, lo) >= 0.0) {
        r.stationary = false;
        r.lambda_star = lo;
        r.edge = r.bulk_edge = psi(model, lo);
        return r;
    }
    double hi = top * (1.0 + std::sqrt(model.c())) * 10.0;
    int doublings = 0;
    while (psi_prime(model, hi) <= 0.0) {
        if (++doublings > kMaxDoublings) {
            throw ConvergenceError("upper_edge: no sign change of psi' found");
        }
        hi = top + 2.0 * (hi - top);
    }
    r.lambda_star = bisect_increasing(model, lo, hi);
    r.edge = r.bulk_edge = psi(model, r.lambda_star);
    return r;
}

EdgeResult lower_edge(const MPModel& model) {
    const double bottom = model.H().support_lower();
    const double top = model.H().support_upper();
    const double c = model.c();
    EdgeResult r;
    r.side = EdgeSide::lower;
    r.mass_at_zero = c > 1.0 ? 1.0 - 1.0 / c : 0.0;
    const double hi = bottom - 1e-8 * std::max(top, std::numeric_limits<double>::min());
    if (psi_prime(model, hi) >= 0.0) {
        r.stationary = false;
        r.lambda_star = hi;
        r.bulk_edge = std::max(0.0, psi(model, hi));
    } else {
        double span = (top > 0.0 ? top : 1.0) * (1.0 + std::sqrt(c)) * 10.0;
        double lo = bottom - span;
        int doublings = 0;
        while (psi_prime(model, lo) <= 0.0) {
            if (++doublings > kMaxDoublings) {
                throw ConvergenceError("lower_edge: no sign change of psi' found");
            }
            span *= 2.0;
            lo = bottom - span;
        }
        r.lambda_star = bisect_decreasing(model, lo, hi);
        r.bulk_edge = std::max(0.0, psi(model, r.lambda_star));
    }
    r.edge = c > 1.0 ? 0.0 : r.bulk_edge;
    return r;
}

std::complex<double> stieltjes(const MPModel& model, std::complex<double> z) {
    using cd = std::complex<double>;
    if (!(z.imag() > 0.0)) {
        if (z.imag() < 0.0) {
            throw DomainError("stieltjes: Im z must be >= 0");
        }
        const double x = z.real();
        if (x > 0.0 && x <= upper_edge(model).edge) {
            const auto lower = lower_edge(model);
            if (x >= lower.bulk_edge) {
                throw DomainError("stieltjes: real z inside the support");
            }
        }
    }
    const auto t = model.H().locations();
    const auto w = model.H().weights();
    const double c = model.c();
    cd s = -1.0 / z;
    for (int it = 0; it < kStieltjesMaxIter; ++it) {
        const cd a = 1.0 - c - c * z * s;
        cd acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            acc += w[i] / (t[i] * a - z);
        }
        const cd next = (1.0 - kOmega) * s + kOmega * acc;
        if (std::abs(next - s) < kStieltjesTol * std::abs(next)) {
            if (z.imag() > 0.0 && next.imag() < 0.0) {
                return {next.real(), 0.0};
            }
            return next;
        }
        s = next;
    }
    throw ConvergenceError("stieltjes: no convergence at z = (" + std::to_string(z.real()) + ", " +
                           std::to_string(z.imag()) + ")");
}

double mp_density(const MPModel& model, double x) {
    if (!(x > 0.0)) {
        throw DomainError("mp_density: x must be positive");
    }
    const double b = upper_edge(model).edge;
    if (x >= b || x <= lower_edge(model).bulk_edge) {
        return 0.0;
    }
    const double e1 = 1e-3 * b;
    const double e2 = 1e-4 * b;
    const double f1 = stieltjes(model, {x, e1}).imag() / M_PI;
    const double f2 = stieltjes(model, {x, e2}).imag() / M_PI;
    const double f0 = f2 + (f2 - f1) * e2 / (e1 - e2);
    return std::max(0.0, f0);
}

double kappa(const MPModel& model, double u) {
    const double mu = mean_h(model.H());
    const auto edge = upper_edge(model);
    const double b = edge.edge;
    const double z = u * mu;
    if (!std::isfinite(u) || z < b * (1.0 - 1e-12)) {
        throw DomainError("kappa: u * mu_H must be >= b");
    }
    if (z > b * (1.0 + 1e-9)) {
        return kappa_direct(model, z, mu);
    }
    // at the edge a = 1 + c m equals b / lambda_star
    return (u - 1.0) * (b / edge.lambda_star - 1.0);
}

int rank_r0(const MPModel& model, std::span<const double> spikes) {
    const double top = model.H().support_upper();
    const double guard = top * (1.0 + 1e-10);
    for (std::size_t j = 1; j < spikes.size(); ++j) {
        if (spikes[j] > spikes[j - 1]) {
            throw DomainError("rank_r0: spikes must be descending");
        }
    }
    int r = 0;
    for (std::size_t j = 0; j < spikes.size(); ++j) {
        const double lam = spikes[j];
        if (!(lam > guard)) {
            break;
        }
        if (std::isinf(lam) || psi_prime(model, lam) > 0.0) {
            r = static_cast<int>(j) + 1;
        } else {
            break;
        }
    }
    return r;
}

}  // namespace rankspectra
