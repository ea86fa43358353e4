#pragma once

#include <complex>
#include <span>

#include "rankspectra/spectral_distribution.hpp"

namespace rankspectra {

/// Generalized Marchenko-Pastur law F_{c,H}: limit ESD of the sample
/// covariance when p/n -> c and the population ESD -> H.
class MPModel {
public:
    MPModel(double c, SpectralDistribution H);

    double c() const noexcept { return c_; }
    const SpectralDistribution& H() const noexcept { return H_; }

private:
    double c_;
    SpectralDistribution H_;
};

enum class EdgeSide { lower, upper };

struct EdgeResult {
    double lambda_star = 0.0;   // stationary point of psi
    double edge = 0.0;          // essential infimum / supremum of F_{c,H}
    EdgeSide side = EdgeSide::upper;
    /// Infimum of the continuous part. Differs from `edge` only on the lower
    /// side with c > 1, where F has an atom of mass 1 - 1/c at zero.
    double bulk_edge = 0.0;
    double mass_at_zero = 0.0;
    /// False when psi' has no zero on that side of the support (psi' keeps
    /// one sign up to the support boundary); the edge is then psi at the
    /// boundary.
    bool stationary = true;
};

double mean_h(const SpectralDistribution& H) noexcept;

/// psi(lam) = lam * (1 + c * int t / (lam - t) dH(t)), lam outside supp H.
double psi(const MPModel& model, double lam);

/// psi'(lam) = 1 - c * int t^2 / (lam - t)^2 dH(t).
double psi_prime(const MPModel& model, double lam);

EdgeResult upper_edge(const MPModel& model);
EdgeResult lower_edge(const MPModel& model);

/// Stieltjes transform s(z) of F_{c,H}: the fixed point of
/// s = int 1 / (t (1 - c - c z s) - z) dH(t), by damped iteration.
/// Requires Im z > 0, or real z outside the support.
std::complex<double> stieltjes(const MPModel& model, std::complex<double> z);

/// Density of F_{c,H} at x > 0 by Stieltjes inversion, extrapolated to the
/// real axis from two heights.
double mp_density(const MPModel& model, double x);

/// kappa(u) = c (u - 1) int (t/mu) / (u - t/mu) dF_{c,H}(t) for u >= b / mu_H.
double kappa(const MPModel& model, double u);

/// Number of identifiable population spikes: largest j with lam_j above
/// the support of H and psi'(lam_j) > 0. `spikes` must be descending.
int rank_r0(const MPModel& model, std::span<const double> spikes);

}  // namespace rankspectra
