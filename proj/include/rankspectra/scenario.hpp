#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankspectra/simgen.hpp"

namespace rankspectra {

inline constexpr int kSchemaVersion = 1;

/// A bundle of simulation settings sharing a seed and method list.
struct StudyConfig {
    std::string name;
    std::uint64_t master_seed = 0;
    int T = 100;
    std::vector<Method> methods;
    std::vector<ScenarioConfig> settings;
};

/// Parses and validates a study document. Unknown keys, a missing or
/// different schema_version, and invalid settings raise ConfigError.
///
/// Setting keys: id, n, p, H, r0, lambda_r0, spike_scheme, gamma_scheme,
/// noise_law, q, pc_sigma2, T, exact_rotation. spike_scheme is
/// "uniform_shift", {"type": "explicit_lambda1", "lambda1": x} or
/// {"type": "geometric", "alpha": x}; gamma_scheme is "haar" or
/// {"type": "block", "K": k}; pc_sigma2 is "mu_H", "estimate" or a number.
StudyConfig parse_study(const nlohmann::json& doc);
StudyConfig load_study(const std::filesystem::path& path);

/// Gap-table settings document: {"schema_version": 1, "settings":
/// [{"id", "n", "p", "H", "lambda_r0"}, ...]}.
std::vector<GapSetting> load_gap_settings(const std::filesystem::path& path);

/// One row per (setting, method). Deterministic: no timings.
std::string accuracy_csv(std::span<const AccuracyTable> tables);

/// Hex digest of the canonical JSON dump.
std::string config_digest(const nlohmann::json& doc);

}  // namespace rankspectra
