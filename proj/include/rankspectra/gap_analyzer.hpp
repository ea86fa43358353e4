#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankspectra/estimate.hpp"
#include "rankspectra/h_spec.hpp"
#include "rankspectra/rmt_core.hpp"

namespace rankspectra {

/// g(u) = u - 1 - ln u.
double g(double u);

/// True for the nine information criteria, which have a gap condition.
bool has_gap_condition(Method m) noexcept;

/// Method threshold beta_m(u) with c = p / n. Constant in u except GIC,
/// where it is 2 kappa(u).
double beta_value(Method m, std::size_t n, std::size_t p, const MPModel& model, double u);

struct GapReport {
    Method method = Method::AIC;
    bool first_ok = false;   // beta(psi_r0 / mu) < g(psi_r0 / mu)
    bool second_ok = false;  // g(b / mu) < beta(b / mu)
    double g_psi = 0.0;
    double g_b = 0.0;
    double beta_at_psi = 0.0;
    double beta_at_b = 0.0;
    double psi_r0 = 0.0;
    double b = 0.0;
    double mu_H = 0.0;

    bool ok() const noexcept { return first_ok && second_ok; }
};

/// Finite-sample gap conditions for one method; c = p / n.
GapReport check_gap(Method m, const MPModel& model, double lambda_r0, std::size_t n, std::size_t p);

struct GapSetting {
    std::string id;
    std::size_t n = 0;
    std::size_t p = 0;
    HSpec H;
    double lambda_r0 = 0.0;
};

struct GapRow {
    GapSetting setting;
    double c = 0.0;
    double psi_r0 = 0.0;
    double b = 0.0;
    double mu_H = 0.0;
    double g_psi = 0.0;
    double g_b = 0.0;
    double beta_aic = 0.0;
    double beta_bic = 0.0;
    double two_kappa_psi = 0.0;
    double two_kappa_b = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    std::map<Method, GapReport> reports;
    std::optional<std::string> error;  // set when the row could not be evaluated
};

std::vector<GapRow> gap_table(std::span<const GapSetting> settings, std::span<const Method> methods);

/// One row per setting; values columns then a T/F column per method.
std::string gap_table_csv(std::span<const GapRow> rows, std::span<const Method> methods);

struct CurveSample {
    std::string series;
    double lambda;
    double y;
};

struct CurveBundle {
    std::vector<CurveSample> samples;
    std::vector<double> skipped;  // grid points inside the support of H
};

/// `points` equispaced values on [max(1.01 top(H), 1.001 lambda_b), lambda_max].
std::vector<double> default_lambda_grid(const MPModel& model, double lambda_max, std::size_t points = 200);

/// Series: g_psi (g(psi(lambda)/mu)), g_b, beta_<method>, and for GIC
/// two_kappa_psi and two_kappa_b.
CurveBundle gap_curves(const MPModel& model, std::span<const double> lambda_grid, std::size_t n,
                       std::size_t p, std::span<const Method> methods);

/// Long format: series,lambda,y.
std::string gap_curves_csv(const CurveBundle& bundle);

}  // namespace rankspectra
