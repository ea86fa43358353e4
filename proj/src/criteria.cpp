#include "rankspectra/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "rankspectra/alt_estimators.hpp"
#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

double nd(std::size_t v) { return static_cast<double>(v); }

// Smallest argmin over the admissible range.
RankEstimate select_min(Method m, std::vector<double> values, bool include_zero) {
    RankEstimate est;
    est.method = m;
    est.q = static_cast<int>(values.size()) - 1;
    const int start = include_zero ? 0 : 1;
    int best = start;
    for (int r = 0; r <= est.q; ++r) {
        est.curve.push_back({r, values[static_cast<std::size_t>(r)]});
        if (r > start && values[static_cast<std::size_t>(r)] < values[static_cast<std::size_t>(best)]) {
            best = r;
        }
    }
    est.r_hat = best;
    return est;
}

RankEstimate likelihood_criterion(Method m, const EigenSpectrum& spec, const EstimatorConfig& cfg,
                                  double pen_scale) {
    const int q = resolve_q(spec, cfg);
    std::vector<double> v(static_cast<std::size_t>(q) + 1);
    for (int r = 0; r <= q; ++r) {
        v[static_cast<std::size_t>(r)] = loglik_term(spec, r) + pen_scale * free_params(r, spec.p());
    }
    auto est = select_min(m, std::move(v), cfg.include_zero);
    est.metadata["n"] = nd(spec.n());
    est.metadata["p"] = nd(spec.p());
    return est;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::AIC: return "AIC";
        case Method::BIC: return "BIC";
        case Method::GIC: return "GIC";
        case Method::PC1: return "PC1";
        case Method::PC2: return "PC2";
        case Method::PC3: return "PC3";
        case Method::IC1: return "IC1";
        case Method::IC2: return "IC2";
        case Method::IC3: return "IC3";
        case Method::ACT: return "ACT";
        case Method::DPA: return "DPA";
        case Method::BEMA: return "BEMA";
        case Method::ED: return "ED";
        case Method::ON: return "ON";
        case Method::ER: return "ER";
        case Method::GR: return "GR";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string up;
    for (char ch : name) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
        }
    }
    for (Method m : kAllMethods) {
        if (method_name(m) == up) {
            return m;
        }
    }
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view list) {
    std::vector<Method> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string_view::npos) {
            end = list.size();
        }
        const auto item = list.substr(start, end - start);
        std::string low;
        for (char ch : item) {
            if (!std::isspace(static_cast<unsigned char>(ch))) {
                low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            }
        }
        if (low == "all") {
            out.assign(std::begin(kAllMethods), std::end(kAllMethods));
        } else if (!low.empty()) {
            const Method m = parse_method(low);
            if (std::find(out.begin(), out.end(), m) == out.end()) {
                out.push_back(m);
            }
        }
        start = end + 1;
    }
    return out;
}

int default_q(std::size_t n, std::size_t p) noexcept {
    return static_cast<int>(std::floor(2.0 * std::sqrt(nd(std::min(n, p)))));
}

nlohmann::json to_json(const RankEstimate& est) {
    nlohmann::json j;
    j["method"] = method_name(est.method);
    j["r_hat"] = est.r_hat;
    j["q"] = est.q;
    auto curve = nlohmann::json::array();
    for (const auto& pt : est.curve) {
        curve.push_back({{"r", pt.r}, {"value", std::isfinite(pt.value) ? nlohmann::json(pt.value) : nullptr}});
    }
    j["curve"] = std::move(curve);
    j["metadata"] = est.metadata;
    j["warnings"] = est.warnings;
    return j;
}

int resolve_q(const EigenSpectrum& spec, const EstimatorConfig& cfg, int extra_needed) {
    const int q = cfg.q.value_or(default_q(spec.n(), spec.p()));
    // criteria need q < p; ratio and gap methods look extra_needed steps past q
    const int need = std::max(extra_needed, 1);
    if (q < 1 || static_cast<std::size_t>(q + need) > spec.p()) {
        throw DomainError("q = " + std::to_string(q) + " out of range for p = " + std::to_string(spec.p()));
    }
    return q;
}

double free_params(int r, std::size_t p) {
    const double rd = r;
    return nd(p) * rd - rd * (rd + 2.0) / 2.0 + rd + 1.0 + nd(p);
}

double loglik_term(const EigenSpectrum& spec, int r) {
    if (r < 0 || static_cast<std::size_t>(r) >= spec.p()) {
        throw RangeError("loglik_term: r out of range");
    }
    double acc = 0.0;
    for (int j = 0; j < r; ++j) {
        if (!(spec[static_cast<std::size_t>(j)] > 0.0)) {
            throw DomainError("loglik_term: nonpositive eigenvalue among the leading r");
        }
        acc += std::log(spec[static_cast<std::size_t>(j)]);
    }
    const double s2 = tail_mean(spec, static_cast<std::size_t>(r));
    if (!(s2 > 0.0)) {
        throw DomainError("loglik_term: nonpositive tail mean at r = " + std::to_string(r));
    }
    return acc + nd(spec.p() - static_cast<std::size_t>(r)) * std::log(s2);
}

double gic_penalty(const EigenSpectrum& spec, int r) {
    if (r < 0 || static_cast<std::size_t>(r) >= spec.p()) {
        throw RangeError("gic_penalty: r out of range");
    }
    const auto ru = static_cast<std::size_t>(r);
    const std::size_t p = spec.p();
    const double s2 = tail_mean(spec, ru);
    if (!(s2 > 0.0)) {
        throw DomainError("gic_penalty: nonpositive tail mean");
    }
    double cross = 0.0;
    for (std::size_t j = 0; j < ru; ++j) {
        const double lj = spec[j];
        for (std::size_t l = ru; l < p; ++l) {
            const double ll = spec[l];
            if (ll == 0.0) {
                continue;
            }
            if (lj == ll) {
                throw DegenerateSpectrumError("gic_penalty: spiked and bulk eigenvalue coincide");
            }
            cross += ll * (lj - s2) / (s2 * (lj - ll));
        }
    }
    double second = 0.0;
    for (std::size_t l = ru; l < p; ++l) {
        second += spec[l] * spec[l];
    }
    second /= nd(p - ru);
    const double rd = r;
    return rd * (rd - 1.0) / 2.0 + cross + rd + second / (s2 * s2);
}

RankEstimate aic(const EigenSpectrum& spec, const EstimatorConfig& cfg) {
    return likelihood_criterion(Method::AIC, spec, cfg, 2.0 / nd(spec.n()));
}

RankEstimate bic(const EigenSpectrum& spec, const EstimatorConfig& cfg) {
    return likelihood_criterion(Method::BIC, spec, cfg, std::log(nd(spec.n())) / nd(spec.n()));
}

RankEstimate gic(const EigenSpectrum& spec, const EstimatorConfig& cfg) {
    const int q = resolve_q(spec, cfg);
    std::vector<double> v(static_cast<std::size_t>(q) + 1);
    std::vector<int> tied;
    for (int r = 0; r <= q; ++r) {
        try {
            v[static_cast<std::size_t>(r)] = loglik_term(spec, r) + 2.0 / nd(spec.n()) * gic_penalty(spec, r);
        } catch (const DegenerateSpectrumError&) {
            // penalty undefined when a spiked and a bulk eigenvalue coincide
            v[static_cast<std::size_t>(r)] = std::numeric_limits<double>::infinity();
            tied.push_back(r);
        }
    }
    auto est = select_min(Method::GIC, std::move(v), cfg.include_zero);
    if (!tied.empty()) {
        est.warnings.push_back(std::to_string(tied.size()) + " candidate rank(s) skipped: tied eigenvalues at the split");
    }
    est.metadata["n"] = nd(spec.n());
    est.metadata["p"] = nd(spec.p());
    return est;
}

double pc_factor(int variant, std::size_t n, std::size_t p) {
    const double N = nd(n);
    const double P = nd(p);
    const double m = nd(std::min(n, p));
    switch (variant) {
        case 1: return (N + P) / (N * P) * std::log(N * P / (N + P));
        case 2: return (N + P) / (N * P) * std::log(m);
        case 3: return std::log(m) / m;
        default: throw DomainError("PC/IC variant must be 1, 2 or 3");
    }
}

RankEstimate pc(const EigenSpectrum& spec, const EstimatorConfig& cfg, int variant) {
    const int q = resolve_q(spec, cfg);
    const double factor = pc_factor(variant, spec.n(), spec.p());
    const double s2 = cfg.noise_variance.value_or(tail_mean(spec, static_cast<std::size_t>(q)));
    const auto& tails = spec.tail_sums();
    std::vector<double> v(static_cast<std::size_t>(q) + 1);
    for (int r = 0; r <= q; ++r) {
        v[static_cast<std::size_t>(r)] = tails[static_cast<std::size_t>(r)] / nd(spec.p()) + s2 * r * factor;
    }
    const Method m = variant == 1 ? Method::PC1 : variant == 2 ? Method::PC2 : Method::PC3;
    auto est = select_min(m, std::move(v), cfg.include_zero);
    est.metadata["sigma2"] = s2;
    est.metadata["n"] = nd(spec.n());
    est.metadata["p"] = nd(spec.p());
    return est;
}

RankEstimate ic(const EigenSpectrum& spec, const EstimatorConfig& cfg, int variant) {
    const int q = resolve_q(spec, cfg);
    const double factor = pc_factor(variant, spec.n(), spec.p());
    const auto& tails = spec.tail_sums();
    std::vector<double> v(static_cast<std::size_t>(q) + 1);
    for (int r = 0; r <= q; ++r) {
        const double tm = tails[static_cast<std::size_t>(r)] / nd(spec.p());
        if (!(tm > 0.0)) {
            throw DomainError("IC: nonpositive tail mean at r = " + std::to_string(r));
        }
        v[static_cast<std::size_t>(r)] = std::log(tm) + r * factor;
    }
    const Method m = variant == 1 ? Method::IC1 : variant == 2 ? Method::IC2 : Method::IC3;
    auto est = select_min(m, std::move(v), cfg.include_zero);
    est.metadata["n"] = nd(spec.n());
    est.metadata["p"] = nd(spec.p());
    return est;
}

EstimateResults estimate_all(const EstimationInput& input, const EstimatorConfig& cfg,
                             std::span<const Method> methods) {
    EstimateResults out;
    const auto& spec = input.covariance;
    for (Method m : methods) {
        try {
            RankEstimate est;
            switch (m) {
                case Method::AIC: est = aic(spec, cfg); break;
                case Method::BIC: est = bic(spec, cfg); break;
                case Method::GIC: est = gic(spec, cfg); break;
                case Method::PC1: est = pc(spec, cfg, 1); break;
                case Method::PC2: est = pc(spec, cfg, 2); break;
                case Method::PC3: est = pc(spec, cfg, 3); break;
                case Method::IC1: est = ic(spec, cfg, 1); break;
                case Method::IC2: est = ic(spec, cfg, 2); break;
                case Method::IC3: est = ic(spec, cfg, 3); break;
                case Method::ACT:
                    if (!input.correlation) {
                        throw DomainError("ACT needs the correlation spectrum (raw data input)");
                    }
                    est = act(*input.correlation, resolve_q(*input.correlation, cfg));
                    break;
                case Method::DPA:
                    if (!input.diagonal) {
                        throw DomainError("DPA needs the diagonal of S_n (raw data input)");
                    }
                    est = dpa(spec, *input.diagonal);
                    break;
                case Method::BEMA: {
                    Rng rng(cfg.bema_seed);
                    est = bema(spec, cfg.bema, rng);
                    break;
                }
                case Method::ED: est = ed(spec, resolve_q(spec, cfg, 5), cfg.ed_max_iterations); break;
                case Method::ON: est = on(spec, resolve_q(spec, cfg, 2)); break;
                case Method::ER: est = er(spec, resolve_q(spec, cfg, 1)); break;
                case Method::GR: est = gr(spec, resolve_q(spec, cfg, 2)); break;
            }
            out.estimates.emplace(m, std::move(est));
        } catch (const std::exception& e) {
            out.errors.emplace(m, e.what());
        }
    }
    return out;
}

}  // namespace rankspectra
