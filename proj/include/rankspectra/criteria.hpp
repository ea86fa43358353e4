#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rankspectra/estimate.hpp"
#include "rankspectra/spectra.hpp"

namespace rankspectra {

/// b_r = p r - r (r + 2) / 2 + r + 1 + p. Half-integral for odd r.
double free_params(int r, std::size_t p);

/// ln|Sigma_r| = sum_{j <= r} ln lambda_j + (p - r) ln sigma_r^2.
double loglik_term(const EigenSpectrum& spec, int r);

/// GIC penalty b_r^GIC: C(r,2) + sum_{j<=r} sum_{l>r} lambda_l (lambda_j - s)
/// / (s (lambda_j - lambda_l)) + r + tail second moment / s^2, s = sigma_r^2.
double gic_penalty(const EigenSpectrum& spec, int r);

RankEstimate aic(const EigenSpectrum& spec, const EstimatorConfig& cfg);
RankEstimate bic(const EigenSpectrum& spec, const EstimatorConfig& cfg);
RankEstimate gic(const EigenSpectrum& spec, const EstimatorConfig& cfg);

/// Penalty factor shared by PC_k and IC_k.
double pc_factor(int variant, std::size_t n, std::size_t p);

RankEstimate pc(const EigenSpectrum& spec, const EstimatorConfig& cfg, int variant);
RankEstimate ic(const EigenSpectrum& spec, const EstimatorConfig& cfg, int variant);

/// Resolved search bound; throws DomainError when q is out of range.
int resolve_q(const EigenSpectrum& spec, const EstimatorConfig& cfg, int extra_needed = 0);

/// Everything an estimator may need. ACT needs `correlation`, DPA `diagonal`.
struct EstimationInput {
    EigenSpectrum covariance;
    std::optional<EigenSpectrum> correlation;
    std::optional<std::vector<double>> diagonal;
};

struct EstimateResults {
    std::map<Method, RankEstimate> estimates;
    std::map<Method, std::string> errors;
};

/// Runs each method independently; a failing method lands in `errors`.
EstimateResults estimate_all(const EstimationInput& input, const EstimatorConfig& cfg,
                             std::span<const Method> methods);

}  // namespace rankspectra
