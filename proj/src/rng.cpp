#include "rankspectra/rng.hpp"

namespace rankspectra {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t setting_id,
                          std::uint64_t replication_index) noexcept {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ setting_id);
    h = splitmix64(h ^ replication_index);
    return h;
}

std::uint64_t hash_string(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace rankspectra
