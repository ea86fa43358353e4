#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rankspectra/estimate.hpp"
#include "rankspectra/gap_analyzer.hpp"
#include "rankspectra/h_spec.hpp"
#include "rankspectra/rng.hpp"
#include "rankspectra/spectra.hpp"

namespace rankspectra {

enum class NoiseLaw { gaussian, t5, pareto, lognormal };
enum class SpikeScheme { uniform_shift, explicit_lambda1, geometric };
enum class GammaScheme { haar, block };
enum class PcSigma { mu_H, estimate, value };

struct ScenarioConfig {
    std::string id;
    std::size_t n = 0;
    std::size_t p = 0;
    HSpec H;
    int r0 = 0;
    double lambda_r0 = 0.0;
    SpikeScheme spike_scheme = SpikeScheme::uniform_shift;
    double lambda1 = 0.0;      // explicit_lambda1
    double alpha = 0.0;        // geometric ratio
    GammaScheme gamma_scheme = GammaScheme::haar;
    std::size_t blocks = 1;    // block(K)
    NoiseLaw noise_law = NoiseLaw::gaussian;
    int T = 100;
    std::uint64_t master_seed = 0;
    int q = 0;                 // 0: floor(2 sqrt(min(n, p)))
    PcSigma pc_sigma = PcSigma::mu_H;
    double pc_sigma2 = 0.0;    // PcSigma::value
    /// Always draw Gamma and form Sigma^{1/2}. When false and nothing needs
    /// the rotation (Gaussian noise, no ACT/DPA), the covariance spectrum is
    /// drawn from Z Lambda^{1/2}, which has the same distribution.
    bool exact_rotation = false;

    /// Throws ConfigError on violated invariants (r0 < q < min(n, p), ...).
    void validate() const;
    int effective_q() const;
};

std::string_view noise_law_name(NoiseLaw law) noexcept;
NoiseLaw parse_noise_law(std::string_view name);

struct PopulationModel {
    Eigen::MatrixXd sigma_root;  // empty when the rotation is skipped
    std::vector<double> eigvals;  // descending
    int r0 = 0;
};

std::vector<double> sample_H(const HSpec& H, std::size_t count, Rng& rng);

/// lambda_1..lambda_r0, descending.
std::vector<double> build_spikes(const ScenarioConfig& cfg, Rng& rng);

Eigen::MatrixXd haar_orthogonal(std::size_t p, Rng& rng);

/// Block sizes floor(p / K), the last block absorbs the remainder.
std::vector<std::size_t> block_sizes(std::size_t p, std::size_t K);
Eigen::MatrixXd block_orthogonal(std::size_t p, std::size_t K, Rng& rng);

/// Steps 1-2: spikes, bulk from H, rotation. `with_rotation` false leaves
/// sigma_root empty.
PopulationModel build_population(const ScenarioConfig& cfg, Rng& rng, bool with_rotation = true);

/// n x p matrix of iid standardized draws.
Eigen::MatrixXd draw_noise(std::size_t n, std::size_t p, NoiseLaw law, Rng& rng);

/// Rows x_i = Sigma^{1/2} z_i (or Lambda^{1/2} z_i when sigma_root is empty).
DataMatrix draw_data(const PopulationModel& model, std::size_t n, NoiseLaw law, Rng& rng);

/// True when the methods and noise law allow skipping the rotation.
bool rotation_needed(const ScenarioConfig& cfg, std::span<const Method> methods);

using ReplicationResult = std::map<Method, std::optional<int>>;

/// One replication with child seed derive_seed(master_seed,
/// hash_string(id), index). Failed methods map to nullopt.
ReplicationResult run_replication(const ScenarioConfig& cfg, std::span<const Method> methods,
                                  std::uint64_t replication_index);

struct MethodAccuracy {
    Method method = Method::AIC;
    int hits = 0;
    int failures = 0;
    double hit_rate = 0.0;    // hits / T; failures count as misses
    double mean_r_hat = 0.0;  // over successful replications
    std::optional<GapReport> gap;
};

struct AccuracyTable {
    ScenarioConfig config;
    std::vector<MethodAccuracy> rows;
    double seconds = 0.0;
};

/// T replications in parallel (OpenMP), reduced in index order.
AccuracyTable run_study(const ScenarioConfig& cfg, std::span<const Method> methods);
/// Single-threaded reference; bit-identical to run_study.
AccuracyTable run_study_serial(const ScenarioConfig& cfg, std::span<const Method> methods);

}  // namespace rankspectra
