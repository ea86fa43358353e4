#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rankspectra/criteria.hpp"
#include "rankspectra/errors.hpp"
#include "naive_criteria.hpp"

using namespace rankspectra;
using namespace naive;

namespace {

EigenSpectrum flat(std::size_t p, double v, std::size_t n = 1000) {
    return EigenSpectrum(std::vector<double>(p, v), n, p);
}

constexpr Method kCriteria[] = {Method::AIC, Method::BIC, Method::GIC, Method::PC1, Method::PC2,
                                Method::PC3, Method::IC1, Method::IC2, Method::IC3};

RankEstimate run(Method m, const EigenSpectrum& s, const EstimatorConfig& cfg) {
    const EstimationInput input{s, std::nullopt, std::nullopt};
    const Method one[] = {m};
    auto res = estimate_all(input, cfg, one);
    if (!res.errors.empty()) {
        throw std::runtime_error(res.errors.begin()->second);
    }
    return res.estimates.at(m);
}

}  // namespace

TEST(FreeParams, Examples) {
    EXPECT_DOUBLE_EQ(free_params(0, 10), 11.0);
    EXPECT_DOUBLE_EQ(free_params(1, 10), 20.5);
    EXPECT_DOUBLE_EQ(free_params(2, 5), 14.0);
}

TEST(LoglikTerm, Examples) {
    EXPECT_NEAR(loglik_term(flat(6, 3.0), 0), 6.0 * std::log(3.0), 1e-12);
    EXPECT_NEAR(loglik_term(flat(6, 3.0), 4), 6.0 * std::log(3.0), 1e-12);
    EXPECT_NEAR(loglik_term(EigenSpectrum({4, 1, 1, 1}, 10, 4), 1), std::log(4.0), 1e-14);
    EXPECT_NEAR(loglik_term(EigenSpectrum({4, 2, 1, 1}, 10, 4), 0), 4.0 * std::log(2.0), 1e-14);
    EXPECT_THROW(loglik_term(EigenSpectrum({4, 2, 0, 0}, 10, 4), 2), DomainError);
    EXPECT_THROW(loglik_term(flat(4, 1.0), 4), RangeError);
}

TEST(GicPenalty, Examples) {
    EXPECT_NEAR(gic_penalty(flat(5, 2.0), 0), 1.0, 1e-14);
    EXPECT_GT(gic_penalty(EigenSpectrum({2, 1, 1, 1}, 10, 4), 0), 1.0);
    EXPECT_NEAR(gic_penalty(EigenSpectrum({4, 1, 1, 1}, 10, 4), 1), 5.0, 1e-14);
    EXPECT_THROW(gic_penalty(EigenSpectrum({2, 2, 1, 1}, 10, 4), 1), DegenerateSpectrumError);
}

TEST(GicPenalty, FiniteAndAtLeastOneForSeparatedSpikes) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_spectrum(rng);
        EXPECT_GE(gic_penalty(s, 0), 1.0 - 1e-12);
        for (int r = 1; r <= 5; ++r) {
            const double v = gic_penalty(s, r);
            EXPECT_TRUE(std::isfinite(v));
        }
    }
}

TEST(Criteria, FlatSpectrumSelectsZero) {
    const auto s = flat(100, 1.7, 400);
    EstimatorConfig cfg;
    for (Method m : kCriteria) {
        const auto est = run(m, s, cfg);
        EXPECT_EQ(est.r_hat, 0) << method_name(m);
        EXPECT_EQ(est.q, 20);
        EXPECT_EQ(est.curve.size(), 21u);
    }
    cfg.noise_variance = 1.7;
    for (int v = 1; v <= 3; ++v) {
        EXPECT_EQ(pc(s, cfg, v).r_hat, 0);
    }
}

TEST(Criteria, ScanMatchesBruteForce) {
    std::mt19937_64 rng(1000);
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_spectrum(rng);
        const std::vector<double> ev(s.values().begin(), s.values().end());
        const EstimatorConfig cfg;
        const int q = default_q(s.n(), s.p());
        for (Method m : kCriteria) {
            const auto est = run(m, s, cfg);
            ASSERT_EQ(static_cast<int>(est.curve.size()), q + 1);
            int best = 0;
            double best_v = naive_value(m, ev, s.n(), 0, q);
            for (int r = 0; r <= q; ++r) {
                const double v = naive_value(m, ev, s.n(), r, q);
                EXPECT_NEAR(est.curve[static_cast<std::size_t>(r)].value, v, 1e-9 * std::max(1.0, std::abs(v)))
                    << method_name(m) << " r=" << r;
                if (v < best_v) {
                    best_v = v;
                    best = r;
                }
            }
            EXPECT_EQ(est.r_hat, best) << method_name(m) << " case " << i;
        }
    }
}

TEST(Criteria, TiesGoToSmallerRank) {
    // PC with zero noise variance on a spectrum with a zero tail: the curve
    // is flat beyond the last positive eigenvalue.
    EstimatorConfig cfg;
    cfg.q = 4;
    cfg.noise_variance = 0.0;
    const EigenSpectrum s({5, 3, 0, 0, 0, 0, 0, 0}, 50, 8);
    EXPECT_EQ(pc(s, cfg, 3).r_hat, 2);
}

TEST(Criteria, ExcludingZero) {
    EstimatorConfig cfg;
    cfg.include_zero = false;
    const auto est = aic(flat(50, 1.0), cfg);
    EXPECT_EQ(est.r_hat, 1);
}

TEST(Criteria, ScaleInvariance) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_spectrum(rng);
        const double factor = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
        const auto t = s.scaled(factor);
        const EstimatorConfig cfg;
        for (Method m : kCriteria) {
            EXPECT_EQ(run(m, s, cfg).r_hat, run(m, t, cfg).r_hat) << method_name(m);
        }
    }
}

TEST(Pc3, DifferencesAreNondecreasing) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_spectrum(rng);
        const auto est = pc(s, EstimatorConfig{}, 3);
        for (std::size_t r = 2; r < est.curve.size(); ++r) {
            const double d1 = est.curve[r - 1].value - est.curve[r - 2].value;
            const double d2 = est.curve[r].value - est.curve[r - 1].value;
            EXPECT_LE(d1, d2 + 1e-12);
        }
    }
}

TEST(Pc3, ExactThresholdCondition) {
    // PC3 returns r0 when lambda_r0 / s2 > p ln m / m > lambda_{r0+1} / s2.
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 400;
        const std::size_t p = 100;
        const double m = 100.0;
        const double s2 = 1.0;
        const double thr = static_cast<double>(p) * std::log(m) / m * s2;
        std::uniform_int_distribution<int> ur(0, 10);
        const int r0 = ur(rng);
        std::uniform_real_distribution<double> above(thr * 1.001, thr * 5.0);
        std::uniform_real_distribution<double> below(0.1, thr * 0.999);
        std::vector<double> ev(p);
        for (std::size_t j = 0; j < p; ++j) {
            ev[j] = static_cast<int>(j) < r0 ? above(rng) : below(rng);
        }
        std::sort(ev.rbegin(), ev.rend());
        EstimatorConfig cfg;
        cfg.noise_variance = s2;
        EXPECT_EQ(pc(EigenSpectrum(ev, n, p), cfg, 3).r_hat, r0);
    }
}

TEST(PcFactor, Values) {
    EXPECT_NEAR(pc_factor(1, 1000, 250), 1250.0 / 250000.0 * std::log(250000.0 / 1250.0), 1e-15);
    EXPECT_NEAR(pc_factor(2, 1000, 250), 1250.0 / 250000.0 * std::log(250.0), 1e-15);
    EXPECT_NEAR(pc_factor(3, 400, 600), std::log(400.0) / 400.0, 1e-15);
    EXPECT_THROW(pc_factor(4, 10, 10), DomainError);
}

TEST(PcNoiseVariance, DefaultsToTailMeanAtQ) {
    const EigenSpectrum s({9, 4, 2, 1, 1, 1, 1, 1, 1, 1}, 100, 10);
    EstimatorConfig cfg;
    cfg.q = 2;
    EXPECT_DOUBLE_EQ(pc(s, cfg, 1).metadata.at("sigma2"), tail_mean(s, 2));
    cfg.noise_variance = 0.5;
    EXPECT_DOUBLE_EQ(pc(s, cfg, 1).metadata.at("sigma2"), 0.5);
}

TEST(ResolveQ, DefaultsAndBounds) {
    EXPECT_EQ(default_q(500, 200), 28);
    EXPECT_EQ(default_q(1000, 250), 31);
    const auto s = flat(10, 1.0);
    EstimatorConfig cfg;
    cfg.q = 9;
    EXPECT_EQ(resolve_q(s, cfg), 9);
    EXPECT_THROW(resolve_q(s, cfg, 2), DomainError);
    cfg.q = 0;
    EXPECT_THROW(resolve_q(s, cfg), DomainError);
}

TEST(EstimateAll, CollectsErrorsPerMethod) {
    const auto s = flat(40, 1.0);
    const EstimationInput input{s, std::nullopt, std::nullopt};
    const Method methods[] = {Method::AIC, Method::BIC, Method::ACT, Method::DPA};
    const auto res = estimate_all(input, EstimatorConfig{}, methods);
    EXPECT_EQ(res.estimates.size(), 2u);
    EXPECT_EQ(res.estimates.at(Method::AIC).r_hat, 0);
    EXPECT_EQ(res.estimates.at(Method::BIC).r_hat, 0);
    EXPECT_EQ(res.errors.size(), 2u);
    EXPECT_TRUE(res.errors.count(Method::ACT));
    EXPECT_TRUE(estimate_all(input, EstimatorConfig{}, std::span<const Method>{}).estimates.empty());
}

TEST(Methods, NamesRoundTrip) {
    for (Method m : kAllMethods) {
        EXPECT_EQ(parse_method(method_name(m)), m);
    }
    EXPECT_EQ(parse_method("pc3"), Method::PC3);
    EXPECT_THROW(parse_method("XYZ"), ConfigError);
    EXPECT_EQ(parse_methods("all").size(), 16u);
    EXPECT_EQ(parse_methods("AIC, bic,AIC"), (std::vector<Method>{Method::AIC, Method::BIC}));
}

TEST(Json, RecordShape) {
    const auto est = aic(flat(20, 1.0), EstimatorConfig{});
    const auto j = to_json(est);
    EXPECT_EQ(j["method"], "AIC");
    EXPECT_EQ(j["r_hat"], 0);
    EXPECT_EQ(j["curve"].size(), est.curve.size());
}
