#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rankspectra {

enum class Method {
    AIC, BIC, GIC,
    PC1, PC2, PC3,
    IC1, IC2, IC3,
    ACT, DPA, BEMA, ED, ON, ER, GR,
};

inline constexpr Method kAllMethods[] = {
    Method::AIC, Method::BIC, Method::GIC, Method::PC1, Method::PC2, Method::PC3,
    Method::IC1, Method::IC2, Method::IC3, Method::ACT, Method::DPA, Method::BEMA,
    Method::ED,  Method::ON,  Method::ER,  Method::GR,
};

std::string_view method_name(Method m) noexcept;

/// Case-insensitive; throws ConfigError on unknown names.
Method parse_method(std::string_view name);

/// Comma-separated list, or "all".
std::vector<Method> parse_methods(std::string_view list);

struct CurvePoint {
    int r;
    double value;
};

struct RankEstimate {
    Method method = Method::AIC;
    int r_hat = 0;
    std::vector<CurvePoint> curve;
    int q = 0;
    std::map<std::string, double> metadata;
    std::vector<std::string> warnings;
};

struct BemaConfig {
    double alpha = 0.2;
    double beta = 0.1;
    int M = 500;
    std::vector<double> theta_grid;  // empty: 40 log-spaced points on [0.1, 100]
    int fit_draws = 50;
    std::uint64_t fit_seed = 0x5eedULL;
};

struct EstimatorConfig {
    std::optional<int> q;                  // default floor(2 sqrt(min(n, p)))
    std::optional<double> noise_variance;  // PC variants; default tail mean at q
    bool include_zero = true;
    int ed_max_iterations = 50;
    BemaConfig bema;
    std::uint64_t bema_seed = 1;
};

int default_q(std::size_t n, std::size_t p) noexcept;

nlohmann::json to_json(const RankEstimate& est);

}  // namespace rankspectra
