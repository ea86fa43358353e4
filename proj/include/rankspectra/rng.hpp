#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rankspectra {

using Rng = std::mt19937_64;

inline constexpr std::string_view kRngName = "mt19937_64/splitmix64";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for one replication: splitmix64 chained over the three keys.
/// Independent of scheduling, so parallel runs stay reproducible.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t setting_id,
                          std::uint64_t replication_index) noexcept;

/// Stable 64-bit FNV-1a hash, used to turn setting identifiers into keys.
std::uint64_t hash_string(std::string_view s) noexcept;

}  // namespace rankspectra
