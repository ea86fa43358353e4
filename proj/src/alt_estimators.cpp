#include "rankspectra/alt_estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

#include <omp.h>

#include "rankspectra/errors.hpp"
#include "rankspectra/rmt_core.hpp"

namespace rankspectra {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double nd(std::size_t v) { return static_cast<double>(v); }

// Smallest argmax over j = 1..q of stat[j - 1].
RankEstimate select_max(Method m, const std::vector<double>& stat) {
    RankEstimate est;
    est.method = m;
    est.q = static_cast<int>(stat.size());
    int best = 1;
    for (int j = 1; j <= est.q; ++j) {
        const double v = stat[static_cast<std::size_t>(j - 1)];
        est.curve.push_back({j, v});
        if (v > stat[static_cast<std::size_t>(best - 1)]) {
            best = j;
        }
    }
    est.r_hat = best;
    return est;
}

void require_q(const EigenSpectrum& spec, int q, int extra, const char* who) {
    if (q < 1 || static_cast<std::size_t>(q + extra) > spec.p()) {
        throw DomainError(std::string(who) + ": q = " + std::to_string(q) + " too large for p = " +
                          std::to_string(spec.p()));
    }
}

// Bulk window [ceil(alpha m), floor((1 - alpha) m)], 1-based, m = min(n, p).
std::pair<std::size_t, std::size_t> bulk_window(std::size_t n, std::size_t p, double alpha) {
    const double m = nd(std::min(n, p));
    const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(alpha * m)));
    const auto hi = static_cast<std::size_t>(std::floor((1.0 - alpha) * m));
    if (hi < lo) {
        throw FitError("BEMA: empty bulk window");
    }
    return {lo, hi};
}

// Pure-noise draw: X = Z diag(sigma), Z iid N(0,1). Returns the spectrum of
// X^T X / n (descending, length min(n, p)).
std::vector<double> noise_spectrum(std::size_t n, std::size_t p, double theta, double sigma2, Rng& rng) {
    std::gamma_distribution<double> gamma(theta, sigma2 / theta);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd scale(static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < scale.size(); ++j) {
        scale[j] = std::sqrt(gamma(rng));
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            X(i, j) = normal(rng) * scale[j];
        }
    }
    const Eigen::MatrixXd G = n >= p ? Eigen::MatrixXd(X.transpose() * X) : Eigen::MatrixXd(X * X.transpose());
    auto ev = symmetric_eigenvalues_desc(G / nd(n));
    return ev;
}

double top_noise_eigenvalue(std::size_t n, std::size_t p, const BemaFit& fit, std::uint64_t seed) {
    Rng rng(seed);
    return noise_spectrum(n, p, fit.theta, fit.sigma2, rng).front();
}

using RefKey = std::tuple<std::size_t, std::size_t, double, int, std::uint64_t, std::size_t, std::size_t>;

// Mean bulk quantiles of unit-scale noise spectra; cached because every
// spectrum with the same (n, p) reuses them.
const std::vector<double>& reference_quantiles(std::size_t n, std::size_t p, double theta, int draws,
                                               std::uint64_t seed, std::size_t lo, std::size_t hi) {
    static std::mutex mu;
    static std::map<RefKey, std::vector<double>> cache;
    const RefKey key{n, p, theta, draws, seed, lo, hi};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) {
            return it->second;
        }
    }
    std::vector<std::vector<double>> per_draw(static_cast<std::size_t>(draws));
#pragma omp parallel for schedule(static)
    for (int d = 0; d < draws; ++d) {
        Rng rng(derive_seed(seed, std::bit_cast<std::uint64_t>(theta), static_cast<std::uint64_t>(d)));
        auto ev = noise_spectrum(n, p, theta, 1.0, rng);
        per_draw[static_cast<std::size_t>(d)].assign(ev.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                                     ev.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    std::vector<double> mean(hi - lo + 1, 0.0);
    for (const auto& v : per_draw) {
        for (std::size_t k = 0; k < mean.size(); ++k) {
            mean[k] += v[k];
        }
    }
    for (auto& v : mean) {
        v /= draws;
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(mean)).first->second;
}

double upper_quantile(std::vector<double> v, double beta) {
    std::sort(v.begin(), v.end());
    const double h = (nd(v.size()) - 1.0) * (1.0 - beta);
    const auto k = static_cast<std::size_t>(std::floor(h));
    if (k + 1 >= v.size()) {
        return v.back();
    }
    return v[k] + (h - nd(k)) * (v[k + 1] - v[k]);
}

void validate(const BemaConfig& cfg) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5) || !(cfg.beta > 0.0 && cfg.beta < 1.0) || cfg.M < 50 ||
        cfg.fit_draws < 1) {
        throw ConfigError("BEMA: need 0 < alpha < 0.5, 0 < beta < 1, M >= 50, fit_draws >= 1");
    }
}

RankEstimate bema_impl(const EigenSpectrum& spec, const BemaConfig& cfg, Rng& rng, bool parallel) {
    validate(cfg);
    const auto fit = bema_fit(spec, cfg);
    const std::uint64_t seed = rng();
    const double b = parallel ? bema_threshold(spec.n(), spec.p(), fit, cfg, seed)
                              : bema_threshold_serial(spec.n(), spec.p(), fit, cfg, seed);
    RankEstimate est;
    est.method = Method::BEMA;
    for (double v : spec.values()) {
        est.r_hat += v > b ? 1 : 0;
    }
    est.q = static_cast<int>(spec.p());
    est.metadata["theta"] = fit.theta;
    est.metadata["sigma2"] = fit.sigma2;
    est.metadata["fit_loss"] = fit.loss;
    est.metadata["threshold"] = b;
    return est;
}

}  // namespace

RankEstimate act(const EigenSpectrum& corr, int q) {
    const std::size_t p = corr.p();
    const std::size_t n = corr.n();
    if (n < 2 || p < 2) {
        throw DomainError("ACT: need n >= 2 and p >= 2");
    }
    const double threshold = 1.0 + std::sqrt(nd(p) / nd(n - 1));
    const std::size_t last = std::min(p - 1, n - 1);
    std::vector<double> corrected(last, kNegInf);
    int r = 0;
    for (std::size_t j = 1; j <= last; ++j) {
        const double z = corr[j - 1];
        if (!(z > 0.0)) {
            break;
        }
        double m = 0.0;
        for (std::size_t l = j + 1; l <= p; ++l) {
            const double d = corr[l - 1] - z;
            if (d == 0.0) {
                throw DomainError("ACT: repeated eigenvalue makes m_{n,j} undefined");
            }
            m += 1.0 / d;
        }
        const double interp = 0.75 * z + 0.25 * corr[j] - z;
        if (interp == 0.0) {
            throw DomainError("ACT: vanishing interpolation term");
        }
        m += 1.0 / interp;
        m /= nd(p - j);
        const double ratio = nd(p - j) / nd(n - 1);
        const double m_under = -(1.0 - ratio) / z + ratio * m;
        if (m_under == 0.0) {
            throw DomainError("ACT: vanishing companion transform");
        }
        corrected[j - 1] = -1.0 / m_under;
        if (corrected[j - 1] > threshold) {
            r = static_cast<int>(j);
        }
    }
    RankEstimate est;
    est.method = Method::ACT;
    est.r_hat = r;
    est.q = q;
    for (int j = 1; j <= q && static_cast<std::size_t>(j) <= last; ++j) {
        est.curve.push_back({j, corrected[static_cast<std::size_t>(j - 1)]});
    }
    est.metadata["threshold"] = threshold;
    return est;
}

RankEstimate dpa(const EigenSpectrum& spec, std::span<const double> diag_values) {
    if (diag_values.size() != spec.p()) {
        throw DomainError("DPA: diagonal length must equal p");
    }
    const MPModel model(nd(spec.p()) / nd(spec.n()), SpectralDistribution::empirical(diag_values));
    const double b = upper_edge(model).edge;
    RankEstimate est;
    est.method = Method::DPA;
    for (double v : spec.values()) {
        est.r_hat += v > b ? 1 : 0;
    }
    est.q = static_cast<int>(spec.p());
    est.metadata["threshold"] = b;
    return est;
}

std::vector<double> bema_default_grid() {
    std::vector<double> grid(40);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = std::pow(10.0, -1.0 + 3.0 * nd(i) / 39.0);
    }
    return grid;
}

BemaFit bema_fit(const EigenSpectrum& spec, const BemaConfig& cfg) {
    validate(cfg);
    const auto [lo, hi] = bulk_window(spec.n(), spec.p(), cfg.alpha);
    const auto grid = cfg.theta_grid.empty() ? bema_default_grid() : cfg.theta_grid;
    BemaFit best;
    best.loss = std::numeric_limits<double>::infinity();
    for (double theta : grid) {
        if (!(theta > 0.0)) {
            throw ConfigError("BEMA: theta grid values must be positive");
        }
        const auto& ref = reference_quantiles(spec.n(), spec.p(), theta, cfg.fit_draws, cfg.fit_seed, lo, hi);
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            sxy += ref[k] * spec[lo - 1 + k];
            sxx += ref[k] * ref[k];
        }
        if (!(sxx > 0.0)) {
            continue;
        }
        const double s2 = sxy / sxx;
        double loss = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            const double d = spec[lo - 1 + k] - s2 * ref[k];
            loss += d * d;
        }
        if (s2 > 0.0 && loss < best.loss) {
            best = {theta, s2, loss};
        }
    }
    if (!(best.sigma2 > 0.0)) {
        throw FitError("BEMA: degenerate fit (bulk eigenvalues are zero?)");
    }
    return best;
}

double bema_threshold(std::size_t n, std::size_t p, const BemaFit& fit, const BemaConfig& cfg,
                      std::uint64_t seed) {
    std::vector<double> top(static_cast<std::size_t>(cfg.M));
#pragma omp parallel for schedule(static)
    for (int m = 0; m < cfg.M; ++m) {
        top[static_cast<std::size_t>(m)] = top_noise_eigenvalue(n, p, fit, derive_seed(seed, 0, static_cast<std::uint64_t>(m)));
    }
    return upper_quantile(std::move(top), cfg.beta);
}

double bema_threshold_serial(std::size_t n, std::size_t p, const BemaFit& fit, const BemaConfig& cfg,
                             std::uint64_t seed) {
    std::vector<double> top(static_cast<std::size_t>(cfg.M));
    for (int m = 0; m < cfg.M; ++m) {
        top[static_cast<std::size_t>(m)] = top_noise_eigenvalue(n, p, fit, derive_seed(seed, 0, static_cast<std::uint64_t>(m)));
    }
    return upper_quantile(std::move(top), cfg.beta);
}

RankEstimate bema(const EigenSpectrum& spec, const BemaConfig& cfg, Rng& rng) {
    return bema_impl(spec, cfg, rng, true);
}

RankEstimate bema_serial(const EigenSpectrum& spec, const BemaConfig& cfg, Rng& rng) {
    return bema_impl(spec, cfg, rng, false);
}

RankEstimate ed(const EigenSpectrum& spec, int q, int max_iterations) {
    require_q(spec, q, 5, "ED");
    auto calibrate = [&](int j) {
        // regress lambda_j..lambda_{j+4} on (j-1)^{2/3}..(j+3)^{2/3}
        double sx = 0.0;
        double sy = 0.0;
        double x[5];
        double y[5];
        for (int k = 0; k < 5; ++k) {
            x[k] = std::pow(static_cast<double>(j - 1 + k), 2.0 / 3.0);
            y[k] = spec[static_cast<std::size_t>(j - 1 + k)];
            sx += x[k];
            sy += y[k];
        }
        const double mx = sx / 5.0;
        const double my = sy / 5.0;
        double sxy = 0.0;
        double sxx = 0.0;
        for (int k = 0; k < 5; ++k) {
            sxy += (x[k] - mx) * (y[k] - my);
            sxx += (x[k] - mx) * (x[k] - mx);
        }
        return 2.0 * std::abs(sxy / sxx);
    };
    auto select = [&](double delta) {
        int r = 0;
        for (int j = 1; j <= q; ++j) {
            const double gap = spec[static_cast<std::size_t>(j - 1)] - spec[static_cast<std::size_t>(j)];
            if (delta > 0.0 ? gap >= delta : gap > 0.0) {
                r = j;
            }
        }
        return r;
    };
    RankEstimate est;
    est.method = Method::ED;
    est.q = q;
    double delta = calibrate(q + 1);
    int r = select(delta);
    int iterations = 1;
    bool converged = false;
    while (iterations < max_iterations) {
        const double next_delta = calibrate(r + 1);
        const int next = select(next_delta);
        ++iterations;
        delta = next_delta;
        if (next == r) {
            converged = true;
            break;
        }
        r = next;
    }
    if (!converged) {
        est.warnings.push_back("ED: iteration limit reached before r_hat repeated");
    }
    est.r_hat = r;
    for (int j = 1; j <= q; ++j) {
        est.curve.push_back({j, spec[static_cast<std::size_t>(j - 1)] - spec[static_cast<std::size_t>(j)]});
    }
    est.metadata["delta"] = delta;
    est.metadata["iterations"] = iterations;
    return est;
}

RankEstimate on(const EigenSpectrum& spec, int q) {
    require_q(spec, q, 2, "ON");
    std::vector<double> stat(static_cast<std::size_t>(q));
    for (int j = 1; j <= q; ++j) {
        const auto i = static_cast<std::size_t>(j - 1);
        const double den = spec[i + 1] - spec[i + 2];
        stat[i] = den > 0.0 ? (spec[i] - spec[i + 1]) / den : kNegInf;
    }
    return select_max(Method::ON, stat);
}

RankEstimate er(const EigenSpectrum& spec, int q) {
    require_q(spec, q, 1, "ER");
    std::vector<double> stat(static_cast<std::size_t>(q));
    for (int j = 1; j <= q; ++j) {
        const auto i = static_cast<std::size_t>(j - 1);
        stat[i] = spec[i + 1] > 0.0 ? spec[i] / spec[i + 1] : kNegInf;
    }
    return select_max(Method::ER, stat);
}

RankEstimate gr(const EigenSpectrum& spec, int q) {
    require_q(spec, q, 2, "GR");
    const auto& tails = spec.tail_sums();
    std::vector<double> stat(static_cast<std::size_t>(q));
    for (int j = 1; j <= q; ++j) {
        const auto i = static_cast<std::size_t>(j - 1);
        const double vj = tails[i + 1];      // sum_{l > j}
        const double vj1 = tails[i + 2];     // sum_{l > j + 1}
        if (!(vj > 0.0) || !(vj1 > 0.0)) {
            stat[i] = kNegInf;
            continue;
        }
        const double den = std::log1p(spec[i + 1] / vj1);
        stat[i] = den > 0.0 ? std::log1p(spec[i] / vj) / den : kNegInf;
    }
    return select_max(Method::GR, stat);
}

}  // namespace rankspectra
