#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace rankspectra {

/// A probability law on [support_lower, support_upper] stored as exact atoms
/// plus quadrature-weighted density nodes. This is the population spectral
/// distribution H that drives every Marchenko-Pastur computation.
///
/// Integrals against H are evaluated as plain weighted sums over the combined
/// point set (atoms first, then density nodes), exposed through locations()
/// and weights().
class SpectralDistribution {
public:
    struct Point {
        double location;
        double weight;
    };

    /// Validates: total mass 1 within 1e-12, locations inside the support,
    /// support_lower >= 0, density nodes ascending, atom locations distinct.
    SpectralDistribution(std::vector<Point> atoms, std::vector<Point> density_nodes,
                         double support_lower, double support_upper);

    static SpectralDistribution point_mass(double location);

    /// Empirical spectral distribution of `values` (mass 1/n each, ties merged).
    static SpectralDistribution empirical(std::span<const double> values);

    /// Weighted mixture; weights must be positive and sum to 1.
    static SpectralDistribution mixture(
        const std::vector<std::pair<double, SpectralDistribution>>& components);

    const std::vector<Point>& atoms() const noexcept { return atoms_; }
    const std::vector<Point>& density_nodes() const noexcept { return nodes_; }
    double support_lower() const noexcept { return lower_; }
    double support_upper() const noexcept { return upper_; }

    std::span<const double> locations() const noexcept { return locations_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return locations_.size(); }

    /// First moment of the law.
    double mean() const noexcept;
    double total_mass() const noexcept;

    /// The law of s*T for T ~ this, s > 0.
    SpectralDistribution scaled(double s) const;

private:
    std::vector<Point> atoms_;
    std::vector<Point> nodes_;
    double lower_ = 0.0;
    double upper_ = 0.0;
    std::vector<double> locations_;
    std::vector<double> weights_;
};

}  // namespace rankspectra
