#include "rankspectra/spectral_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

constexpr double kMassTolerance = 1e-12;

}  // namespace

SpectralDistribution::SpectralDistribution(std::vector<Point> atoms, std::vector<Point> density_nodes,
                                           double support_lower, double support_upper)
    : atoms_(std::move(atoms)),
      nodes_(std::move(density_nodes)),
      lower_(support_lower),
      upper_(support_upper) {
    if (!std::isfinite(lower_) || !std::isfinite(upper_) || lower_ < 0.0 || upper_ < lower_) {
        throw DomainError("SpectralDistribution: invalid support [" + std::to_string(lower_) + ", " +
                          std::to_string(upper_) + "]");
    }
    if (atoms_.empty() && nodes_.empty()) {
        throw DomainError("SpectralDistribution: no atoms or density nodes");
    }
    const double slack = 1e-12 * std::max(1.0, upper_);
    auto check_point = [&](const Point& pt, const char* what) {
        if (!std::isfinite(pt.location) || !std::isfinite(pt.weight) || pt.weight <= 0.0) {
            throw DomainError(std::string("SpectralDistribution: bad ") + what);
        }
        if (pt.location < lower_ - slack || pt.location > upper_ + slack) {
            throw DomainError(std::string("SpectralDistribution: ") + what + " at " +
                              std::to_string(pt.location) + " outside support");
        }
    };
    for (const auto& a : atoms_) {
        check_point(a, "atom");
        if (a.weight > 1.0 + kMassTolerance) {
            throw DomainError("SpectralDistribution: atom mass exceeds 1");
        }
    }
    for (const auto& nd : nodes_) {
        check_point(nd, "density node");
    }
    if (!std::is_sorted(nodes_.begin(), nodes_.end(),
                        [](const Point& l, const Point& r) { return l.location < r.location; })) {
        throw DomainError("SpectralDistribution: density nodes must be ascending");
    }
    std::vector<double> atom_locs;
    atom_locs.reserve(atoms_.size());
    for (const auto& a : atoms_) {
        atom_locs.push_back(a.location);
    }
    std::sort(atom_locs.begin(), atom_locs.end());
    if (std::adjacent_find(atom_locs.begin(), atom_locs.end()) != atom_locs.end()) {
        throw DomainError("SpectralDistribution: duplicate atom locations");
    }

    locations_.reserve(atoms_.size() + nodes_.size());
    weights_.reserve(atoms_.size() + nodes_.size());
    for (const auto& a : atoms_) {
        locations_.push_back(a.location);
        weights_.push_back(a.weight);
    }
    for (const auto& nd : nodes_) {
        locations_.push_back(nd.location);
        weights_.push_back(nd.weight);
    }
    const double mass = total_mass();
    if (std::abs(mass - 1.0) > kMassTolerance) {
        throw DomainError("SpectralDistribution: total mass " + std::to_string(mass) + " != 1");
    }
}

SpectralDistribution SpectralDistribution::point_mass(double location) {
    return SpectralDistribution({{location, 1.0}}, {}, location, location);
}

SpectralDistribution SpectralDistribution::empirical(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("SpectralDistribution::empirical: empty sample");
    }
    std::map<double, std::size_t> counts;
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("SpectralDistribution::empirical: values must be finite and >= 0");
        }
        ++counts[v];
    }
    const auto n = static_cast<double>(values.size());
    std::vector<Point> atoms;
    atoms.reserve(counts.size());
    double mass = 0.0;
    for (const auto& [loc, cnt] : counts) {
        atoms.push_back({loc, static_cast<double>(cnt) / n});
        mass += atoms.back().weight;
    }
    // absorb summation roundoff into the largest atom
    auto heaviest = std::max_element(atoms.begin(), atoms.end(),
                                     [](const Point& l, const Point& r) { return l.weight < r.weight; });
    heaviest->weight += 1.0 - mass;
    return SpectralDistribution(std::move(atoms), {}, counts.begin()->first, counts.rbegin()->first);
}

SpectralDistribution SpectralDistribution::mixture(
    const std::vector<std::pair<double, SpectralDistribution>>& components) {
    if (components.empty()) {
        throw DomainError("SpectralDistribution::mixture: no components");
    }
    double total = 0.0;
    for (const auto& [w, _] : components) {
        if (!(w > 0.0)) {
            throw DomainError("SpectralDistribution::mixture: weights must be positive");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DomainError("SpectralDistribution::mixture: weights must sum to 1");
    }
    std::map<double, double> atoms;
    std::vector<Point> nodes;
    double lower = components.front().second.support_lower();
    double upper = components.front().second.support_upper();
    for (const auto& [w, dist] : components) {
        for (const auto& a : dist.atoms()) {
            atoms[a.location] += w * a.weight;
        }
        for (const auto& nd : dist.density_nodes()) {
            nodes.push_back({nd.location, w * nd.weight});
        }
        lower = std::min(lower, dist.support_lower());
        upper = std::max(upper, dist.support_upper());
    }
    std::stable_sort(nodes.begin(), nodes.end(),
                     [](const Point& l, const Point& r) { return l.location < r.location; });
    std::vector<Point> atom_vec;
    atom_vec.reserve(atoms.size());
    for (const auto& [loc, m] : atoms) {
        atom_vec.push_back({loc, m});
    }
    return SpectralDistribution(std::move(atom_vec), std::move(nodes), lower, upper);
}

double SpectralDistribution::mean() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < locations_.size(); ++i) {
        m += locations_[i] * weights_[i];
    }
    return m;
}

double SpectralDistribution::total_mass() const noexcept {
    double m = 0.0;
    for (double w : weights_) {
        m += w;
    }
    return m;
}

SpectralDistribution SpectralDistribution::scaled(double s) const {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw DomainError("SpectralDistribution::scaled: factor must be positive");
    }
    auto scale_points = [s](std::vector<Point> pts) {
        for (auto& p : pts) {
            p.location *= s;
        }
        return pts;
    };
    return SpectralDistribution(scale_points(atoms_), scale_points(nodes_), s * lower_, s * upper_);
}

}  // namespace rankspectra
