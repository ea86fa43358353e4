#include "rankspectra/gap_analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankspectra/csv.hpp"
#include "rankspectra/errors.hpp"

namespace rankspectra {

namespace {

double nd(std::size_t v) { return static_cast<double>(v); }

// Everything needed to evaluate all nine conditions at one setting.
struct GapValues {
    double c, psi_r0, b, mu, g_psi, g_b;
    double beta_aic, beta_bic, kappa2_psi, kappa2_b, beta1, beta2, beta3;
};

GapValues evaluate(const MPModel& model, double lambda_r0, std::size_t n, std::size_t p, bool need_kappa) {
    GapValues v{};
    v.c = nd(p) / nd(n);
    v.psi_r0 = psi(model, lambda_r0);
    v.b = upper_edge(model).edge;
    v.mu = mean_h(model.H());
    v.g_psi = g(v.psi_r0 / v.mu);
    v.g_b = g(v.b / v.mu);
    v.beta_aic = beta_value(Method::AIC, n, p, model, 0.0);
    v.beta_bic = beta_value(Method::BIC, n, p, model, 0.0);
    v.beta1 = beta_value(Method::PC1, n, p, model, 0.0);
    v.beta2 = beta_value(Method::PC2, n, p, model, 0.0);
    v.beta3 = beta_value(Method::PC3, n, p, model, 0.0);
    if (need_kappa) {
        v.kappa2_b = 2.0 * kappa(model, v.b / v.mu);
        // psi_r0 < b means lambda_r0 sits below lambda_b: not identifiable
        v.kappa2_psi = v.psi_r0 >= v.b ? 2.0 * kappa(model, v.psi_r0 / v.mu) : std::nan("");
    }
    return v;
}

GapReport report_from(Method m, const GapValues& v) {
    GapReport r;
    r.method = m;
    r.g_psi = v.g_psi;
    r.g_b = v.g_b;
    r.psi_r0 = v.psi_r0;
    r.b = v.b;
    r.mu_H = v.mu;
    switch (m) {
        case Method::AIC: r.beta_at_psi = r.beta_at_b = v.beta_aic; break;
        case Method::BIC: r.beta_at_psi = r.beta_at_b = v.beta_bic; break;
        case Method::GIC:
            r.beta_at_psi = v.kappa2_psi;
            r.beta_at_b = v.kappa2_b;
            break;
        case Method::PC1:
        case Method::IC1: r.beta_at_psi = r.beta_at_b = v.beta1; break;
        case Method::PC2:
        case Method::IC2: r.beta_at_psi = r.beta_at_b = v.beta2; break;
        case Method::PC3:
        case Method::IC3: r.beta_at_psi = r.beta_at_b = v.beta3; break;
        default: throw DomainError("no gap condition for " + std::string(method_name(m)));
    }
    r.first_ok = r.beta_at_psi < r.g_psi;  // false when beta is NaN
    r.second_ok = r.g_b < r.beta_at_b;
    return r;
}

}  // namespace

double g(double u) {
    if (!(u > 0.0)) {
        throw DomainError("g: u must be positive");
    }
    return u - 1.0 - std::log(u);
}

bool has_gap_condition(Method m) noexcept {
    switch (m) {
        case Method::AIC:
        case Method::BIC:
        case Method::GIC:
        case Method::PC1:
        case Method::PC2:
        case Method::PC3:
        case Method::IC1:
        case Method::IC2:
        case Method::IC3: return true;
        default: return false;
    }
}

double beta_value(Method m, std::size_t n, std::size_t p, const MPModel& model, double u) {
    const double c = nd(p) / nd(n);
    const double lmin = std::log(nd(std::min(n, p)));
    switch (m) {
        case Method::AIC: return 2.0 * c;
        case Method::BIC: return c * std::log(nd(n));
        case Method::GIC: return 2.0 * kappa(model, u);
        case Method::PC1:
        case Method::IC1: return g((1.0 + c) * std::log(nd(p) / (1.0 + c)));
        case Method::PC2:
        case Method::IC2: return g((1.0 + c) * lmin);
        case Method::PC3:
        case Method::IC3: return g(std::max(1.0, c) * lmin);
        default: throw DomainError("no gap condition for " + std::string(method_name(m)));
    }
}

GapReport check_gap(Method m, const MPModel& model, double lambda_r0, std::size_t n, std::size_t p) {
    if (!has_gap_condition(m)) {
        throw DomainError("no gap condition for " + std::string(method_name(m)));
    }
    return report_from(m, evaluate(model, lambda_r0, n, p, m == Method::GIC));
}

std::vector<GapRow> gap_table(std::span<const GapSetting> settings, std::span<const Method> methods) {
    std::vector<GapRow> rows;
    rows.reserve(settings.size());
    for (const auto& s : settings) {
        GapRow row;
        row.setting = s;
        try {
            const MPModel model(nd(s.p) / nd(s.n), s.H.distribution());
            const auto v = evaluate(model, s.lambda_r0, s.n, s.p, true);
            row.c = v.c;
            row.psi_r0 = v.psi_r0;
            row.b = v.b;
            row.mu_H = v.mu;
            row.g_psi = v.g_psi;
            row.g_b = v.g_b;
            row.beta_aic = v.beta_aic;
            row.beta_bic = v.beta_bic;
            row.two_kappa_psi = v.kappa2_psi;
            row.two_kappa_b = v.kappa2_b;
            row.beta1 = v.beta1;
            row.beta2 = v.beta2;
            row.beta3 = v.beta3;
            for (Method m : methods) {
                if (has_gap_condition(m)) {
                    row.reports.emplace(m, report_from(m, v));
                }
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string gap_table_csv(std::span<const GapRow> rows, std::span<const Method> methods) {
    std::vector<std::string> header{"id",    "n",   "p",   "c",          "lambda_r0",  "psi_r0",
                                    "b",     "mu_H", "g_psi", "g_b",     "AIC",        "BIC",
                                    "2kappa_psi", "2kappa_b", "PC1IC1", "PC2IC2", "PC3IC3"};
    for (Method m : methods) {
        if (has_gap_condition(m)) {
            header.push_back(std::string(method_name(m)) + "_flag");
        }
    }
    header.push_back("error");
    std::string out = csv_row(header);
    for (const auto& r : rows) {
        const auto& s = r.setting;
        std::vector<std::string> f{s.id, std::to_string(s.n), std::to_string(s.p)};
        if (r.error) {
            f.push_back(format_double(nd(s.p) / nd(s.n)));
            f.push_back(format_double(s.lambda_r0));
            for (int k = 0; k < 12; ++k) {
                f.emplace_back();
            }
            for (Method m : methods) {
                if (has_gap_condition(m)) {
                    f.emplace_back();
                }
            }
            f.push_back(*r.error);
        } else {
            for (double v : {r.c, s.lambda_r0, r.psi_r0, r.b, r.mu_H, r.g_psi, r.g_b, r.beta_aic, r.beta_bic,
                             r.two_kappa_psi, r.two_kappa_b, r.beta1, r.beta2, r.beta3}) {
                f.push_back(std::isfinite(v) ? format_double(v) : "");
            }
            for (Method m : methods) {
                if (has_gap_condition(m)) {
                    f.push_back(r.reports.at(m).ok() ? "T" : "F");
                }
            }
            f.emplace_back();
        }
        out += csv_row(f);
    }
    return out;
}

std::vector<double> default_lambda_grid(const MPModel& model, double lambda_max, std::size_t points) {
    const double lo = std::max(1.01 * model.H().support_upper(), 1.001 * upper_edge(model).lambda_star);
    if (!(lambda_max > lo) || points < 2) {
        throw DomainError("default_lambda_grid: lambda_max must exceed " + std::to_string(lo));
    }
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + (lambda_max - lo) * nd(i) / nd(points - 1);
    }
    return grid;
}

CurveBundle gap_curves(const MPModel& model, std::span<const double> lambda_grid, std::size_t n,
                       std::size_t p, std::span<const Method> methods) {
    CurveBundle out;
    const double mu = mean_h(model.H());
    const double b = upper_edge(model).edge;
    const double gb = g(b / mu);
    const bool want_gic = std::find(methods.begin(), methods.end(), Method::GIC) != methods.end();
    const double k2b = want_gic ? 2.0 * kappa(model, b / mu) : 0.0;
    const double top = model.H().support_upper();
    const double bottom = model.H().support_lower();
    for (double lam : lambda_grid) {
        if (lam >= bottom && lam <= top * (1.0 + 1e-10)) {
            out.skipped.push_back(lam);
            continue;
        }
        double ps = 0.0;
        try {
            ps = psi(model, lam);
        } catch (const DomainError&) {
            out.skipped.push_back(lam);
            continue;
        }
        out.samples.push_back({"g_psi", lam, g(ps / mu)});
        out.samples.push_back({"g_b", lam, gb});
        for (Method m : methods) {
            if (!has_gap_condition(m)) {
                continue;
            }
            if (m == Method::GIC) {
                if (ps >= b) {
                    out.samples.push_back({"two_kappa_psi", lam, 2.0 * kappa(model, ps / mu)});
                }
                out.samples.push_back({"two_kappa_b", lam, k2b});
            } else {
                out.samples.push_back({"beta_" + std::string(method_name(m)), lam, beta_value(m, n, p, model, 0.0)});
            }
        }
    }
    return out;
}

std::string gap_curves_csv(const CurveBundle& bundle) {
    std::string out = csv_row({"series", "lambda", "y"});
    for (const auto& s : bundle.samples) {
        out += csv_row({s.series, format_double(s.lambda), format_double(s.y)});
    }
    return out;
}

}  // namespace rankspectra
