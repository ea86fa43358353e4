#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rankspectra/estimate.hpp"
#include "rankspectra/rng.hpp"
#include "rankspectra/spectra.hpp"

namespace rankspectra {

/// Adjusted correlation thresholding. `corr` holds correlation-matrix
/// eigenvalues; returns max j with the bias-corrected eigenvalue above
/// 1 + sqrt(p / (n - 1)). The curve lists the corrected values for j <= q.
RankEstimate act(const EigenSpectrum& corr, int q);

/// Deterministic parallel analysis: count of eigenvalues above the upper
/// edge of F_{p/n, H_hat}, H_hat the ESD of diag(S_n).
RankEstimate dpa(const EigenSpectrum& spec, std::span<const double> diag_values);

struct BemaFit {
    double theta = 0.0;
    double sigma2 = 0.0;
    double loss = 0.0;
};

std::vector<double> bema_default_grid();

/// Least-squares fit of (theta, sigma^2) to the trimmed bulk eigenvalues.
BemaFit bema_fit(const EigenSpectrum& spec, const BemaConfig& cfg);

/// (1 - beta) quantile of the largest eigenvalue over M pure-noise draws
/// from the fitted model. Draw m uses derive_seed(seed, 0, m).
double bema_threshold(std::size_t n, std::size_t p, const BemaFit& fit, const BemaConfig& cfg,
                      std::uint64_t seed);
/// Single-threaded reference for bema_threshold; identical output.
double bema_threshold_serial(std::size_t n, std::size_t p, const BemaFit& fit, const BemaConfig& cfg,
                             std::uint64_t seed);

RankEstimate bema(const EigenSpectrum& spec, const BemaConfig& cfg, Rng& rng);
RankEstimate bema_serial(const EigenSpectrum& spec, const BemaConfig& cfg, Rng& rng);

/// Eigenvalue-difference estimator with the regression-calibrated
/// threshold. Needs p >= q + 5.
RankEstimate ed(const EigenSpectrum& spec, int q, int max_iterations = 50);

/// Argmax over j = 1..q of the gap ratio, the eigenvalue ratio and the
/// growth ratio respectively; undefined ratios count as -inf.
RankEstimate on(const EigenSpectrum& spec, int q);
RankEstimate er(const EigenSpectrum& spec, int q);
RankEstimate gr(const EigenSpectrum& spec, int q);

}  // namespace rankspectra
