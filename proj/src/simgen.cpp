#include "rankspectra/simgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>

#include "rankspectra/criteria.hpp"
#include "rankspectra/errors.hpp"
#include "rankspectra/rmt_core.hpp"

namespace rankspectra {

namespace {

double nd(std::size_t v) { return static_cast<double>(v); }

bool contains(std::span<const Method> methods, Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

AccuracyTable reduce(const ScenarioConfig& cfg, std::span<const Method> methods,
                     const std::vector<ReplicationResult>& reps) {
    AccuracyTable table;
    table.config = cfg;
    std::optional<MPModel> model;
    if (cfg.r0 > 0) {
        try {
            model.emplace(nd(cfg.p) / nd(cfg.n), cfg.H.distribution());
        } catch (const Error&) {
        }
    }
    for (Method m : methods) {
        MethodAccuracy acc;
        acc.method = m;
        double sum = 0.0;
        for (const auto& rep : reps) {
            const auto& r = rep.at(m);
            if (!r) {
                ++acc.failures;
                continue;
            }
            acc.hits += *r == cfg.r0 ? 1 : 0;
            sum += *r;
        }
        const int ok = static_cast<int>(reps.size()) - acc.failures;
        acc.hit_rate = static_cast<double>(acc.hits) / static_cast<double>(reps.size());
        acc.mean_r_hat = ok > 0 ? sum / ok : std::nan("");
        if (model && has_gap_condition(m)) {
            try {
                acc.gap = check_gap(m, *model, cfg.lambda_r0, cfg.n, cfg.p);
            } catch (const Error&) {
            }
        }
        table.rows.push_back(std::move(acc));
    }
    return table;
}

}  // namespace

std::string_view noise_law_name(NoiseLaw law) noexcept {
    switch (law) {
        case NoiseLaw::gaussian: return "gaussian";
        case NoiseLaw::t5: return "t5";
        case NoiseLaw::pareto: return "pareto";
        case NoiseLaw::lognormal: return "lognormal";
    }
    return "?";
}

NoiseLaw parse_noise_law(std::string_view name) {
    if (name == "gaussian" || name == "normal") {
        return NoiseLaw::gaussian;
    }
    if (name == "t5" || name == "t(5)") {
        return NoiseLaw::t5;
    }
    if (name == "pareto" || name == "pareto(5,1)") {
        return NoiseLaw::pareto;
    }
    if (name == "lognormal" || name == "lognormal(0,1)") {
        return NoiseLaw::lognormal;
    }
    throw UnknownDistributionError("unknown noise law '" + std::string(name) + "'");
}

int ScenarioConfig::effective_q() const { return q > 0 ? q : default_q(n, p); }

void ScenarioConfig::validate() const {
    auto fail = [&](const std::string& msg) { throw ConfigError("setting '" + id + "': " + msg); };
    if (n < 2 || p < 1) {
        fail("need n >= 2 and p >= 1");
    }
    const int qq = effective_q();
    if (r0 < 0 || !(r0 < qq) || static_cast<std::size_t>(qq) >= std::min(n, p)) {
        fail("need 0 <= r0 < q < min(n, p); got r0 = " + std::to_string(r0) + ", q = " + std::to_string(qq));
    }
    if (r0 > 0 && !(lambda_r0 > 0.0)) {
        fail("lambda_r0 must be positive");
    }
    if (T < 1) {
        fail("T must be >= 1");
    }
    if (spike_scheme == SpikeScheme::geometric && !(alpha > 1.0)) {
        fail("geometric spikes need alpha > 1");
    }
    if (spike_scheme == SpikeScheme::explicit_lambda1 && !(lambda1 >= lambda_r0)) {
        fail("lambda1 must be >= lambda_r0");
    }
    if (gamma_scheme == GammaScheme::block && (blocks < 1 || blocks > p)) {
        fail("block count must be in [1, p]");
    }
    if (pc_sigma == PcSigma::value && !(pc_sigma2 > 0.0)) {
        fail("pc_sigma2 must be positive");
    }
}

std::vector<double> sample_H(const HSpec& H, std::size_t count, Rng& rng) { return H.sample(rng, count); }

std::vector<double> build_spikes(const ScenarioConfig& cfg, Rng& rng) {
    const int r0 = cfg.r0;
    std::vector<double> spikes;
    if (r0 <= 0) {
        return spikes;
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (cfg.spike_scheme) {
        case SpikeScheme::uniform_shift:
            for (int j = 0; j < r0 - 1; ++j) {
                spikes.push_back(unif(rng) + cfg.lambda_r0);
            }
            break;
        case SpikeScheme::explicit_lambda1:
            for (int j = 1; j < r0 - 1; ++j) {
                spikes.push_back(unif(rng) + cfg.lambda_r0);
            }
            if (r0 >= 2) {
                spikes.push_back(cfg.lambda1);
            }
            break;
        case SpikeScheme::geometric:
            if (!(cfg.alpha > 1.0)) {
                throw ConfigError("geometric spikes need alpha > 1");
            }
            for (int j = 1; j < r0; ++j) {
                spikes.push_back(cfg.lambda_r0 * std::pow(cfg.alpha, r0 - j));
            }
            break;
    }
    std::sort(spikes.begin(), spikes.end(), std::greater<>());
    spikes.push_back(cfg.lambda_r0);
    return spikes;
}

Eigen::MatrixXd haar_orthogonal(std::size_t p, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto P = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd G(P, P);
    for (Eigen::Index j = 0; j < P; ++j) {
        for (Eigen::Index i = 0; i < P; ++i) {
            G(i, j) = normal(rng);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(P, P);
    const auto& R = qr.matrixQR();
    for (Eigen::Index j = 0; j < P; ++j) {
        if (R(j, j) < 0.0) {
            Q.col(j) *= -1.0;
        }
    }
    return Q;
}

std::vector<std::size_t> block_sizes(std::size_t p, std::size_t K) {
    if (K < 1 || K > p) {
        throw DomainError("block_sizes: need 1 <= K <= p");
    }
    std::vector<std::size_t> sizes(K, p / K);
    sizes.back() += p % K;
    return sizes;
}

Eigen::MatrixXd block_orthogonal(std::size_t p, std::size_t K, Rng& rng) {
    const auto sizes = block_sizes(p, K);
    const auto P = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(P, P);
    Eigen::Index offset = 0;
    for (std::size_t s : sizes) {
        const auto S = static_cast<Eigen::Index>(s);
        Q.block(offset, offset, S, S) = haar_orthogonal(s, rng);
        offset += S;
    }
    return Q;
}

PopulationModel build_population(const ScenarioConfig& cfg, Rng& rng, bool with_rotation) {
    PopulationModel model;
    model.r0 = cfg.r0;
    model.eigvals = build_spikes(cfg, rng);
    const auto bulk = sample_H(cfg.H, cfg.p - static_cast<std::size_t>(cfg.r0), rng);
    model.eigvals.insert(model.eigvals.end(), bulk.begin(), bulk.end());
    std::sort(model.eigvals.begin(), model.eigvals.end(), std::greater<>());
    if (with_rotation) {
        const Eigen::MatrixXd Gamma = cfg.gamma_scheme == GammaScheme::haar
                                          ? haar_orthogonal(cfg.p, rng)
                                          : block_orthogonal(cfg.p, cfg.blocks, rng);
        Eigen::VectorXd root(static_cast<Eigen::Index>(cfg.p));
        for (std::size_t j = 0; j < cfg.p; ++j) {
            root[static_cast<Eigen::Index>(j)] = std::sqrt(model.eigvals[j]);
        }
        model.sigma_root = Gamma * root.asDiagonal() * Gamma.transpose();
    }
    return model;
}

Eigen::MatrixXd draw_noise(std::size_t n, std::size_t p, NoiseLaw law, Rng& rng) {
    Eigen::MatrixXd Z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    switch (law) {
        case NoiseLaw::gaussian: {
            std::normal_distribution<double> d(0.0, 1.0);
            for (Eigen::Index k = 0; k < Z.size(); ++k) {
                Z.data()[k] = d(rng);
            }
            break;
        }
        case NoiseLaw::t5: {
            std::student_t_distribution<double> d(5.0);
            const double s = std::sqrt(3.0 / 5.0);
            for (Eigen::Index k = 0; k < Z.size(); ++k) {
                Z.data()[k] = d(rng) * s;
            }
            break;
        }
        case NoiseLaw::pareto: {
            // Pareto(shape 5, scale 1): mean 5/4, variance 5/48
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double mean = 5.0 / 4.0;
            const double sd = std::sqrt(5.0 / 48.0);
            for (Eigen::Index k = 0; k < Z.size(); ++k) {
                const double y = std::pow(1.0 - u(rng), -1.0 / 5.0);
                Z.data()[k] = (y - mean) / sd;
            }
            break;
        }
        case NoiseLaw::lognormal: {
            std::lognormal_distribution<double> d(0.0, 1.0);
            const double mean = std::exp(0.5);
            const double sd = std::sqrt((std::exp(1.0) - 1.0) * std::exp(1.0));
            for (Eigen::Index k = 0; k < Z.size(); ++k) {
                Z.data()[k] = (d(rng) - mean) / sd;
            }
            break;
        }
    }
    return Z;
}

DataMatrix draw_data(const PopulationModel& model, std::size_t n, NoiseLaw law, Rng& rng) {
    const std::size_t p = model.eigvals.size();
    Eigen::MatrixXd Z = draw_noise(n, p, law, rng);
    if (model.sigma_root.size() > 0) {
        return DataMatrix(Z * model.sigma_root);
    }
    for (std::size_t j = 0; j < p; ++j) {
        Z.col(static_cast<Eigen::Index>(j)) *= std::sqrt(model.eigvals[j]);
    }
    return DataMatrix(std::move(Z));
}

bool rotation_needed(const ScenarioConfig& cfg, std::span<const Method> methods) {
    return cfg.exact_rotation || cfg.noise_law != NoiseLaw::gaussian || contains(methods, Method::ACT) ||
           contains(methods, Method::DPA);
}

ReplicationResult run_replication(const ScenarioConfig& cfg, std::span<const Method> methods,
                                  std::uint64_t replication_index) {
    Rng rng(derive_seed(cfg.master_seed, hash_string(cfg.id), replication_index));
    const auto pop = build_population(cfg, rng, rotation_needed(cfg, methods));
    const auto X = draw_data(pop, cfg.n, cfg.noise_law, rng);

    EstimationInput input{cov_eigenvalues(X), std::nullopt, std::nullopt};
    if (contains(methods, Method::ACT)) {
        try {
            input.correlation = corr_eigenvalues(X);
        } catch (const Error&) {
        }
    }
    if (contains(methods, Method::DPA)) {
        input.diagonal = cov_diagonal(X);
    }
    EstimatorConfig ec;
    ec.q = cfg.effective_q();
    switch (cfg.pc_sigma) {
        case PcSigma::mu_H: ec.noise_variance = cfg.H.distribution().mean(); break;
        case PcSigma::value: ec.noise_variance = cfg.pc_sigma2; break;
        case PcSigma::estimate: break;
    }
    ec.bema_seed = rng();
    const auto res = estimate_all(input, ec, methods);

    ReplicationResult out;
    for (Method m : methods) {
        auto it = res.estimates.find(m);
        out[m] = it == res.estimates.end() ? std::nullopt : std::optional<int>(it->second.r_hat);
    }
    return out;
}

AccuracyTable run_study(const ScenarioConfig& cfg, std::span<const Method> methods) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<ReplicationResult> reps(static_cast<std::size_t>(cfg.T));
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < cfg.T; ++t) {
        reps[static_cast<std::size_t>(t)] = run_replication(cfg, methods, static_cast<std::uint64_t>(t));
    }
    auto table = reduce(cfg, methods, reps);
    table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

AccuracyTable run_study_serial(const ScenarioConfig& cfg, std::span<const Method> methods) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<ReplicationResult> reps(static_cast<std::size_t>(cfg.T));
    for (int t = 0; t < cfg.T; ++t) {
        reps[static_cast<std::size_t>(t)] = run_replication(cfg, methods, static_cast<std::uint64_t>(t));
    }
    auto table = reduce(cfg, methods, reps);
    table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

}  // namespace rankspectra
