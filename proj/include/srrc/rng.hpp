#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace srrc {

// Seed derivation for independent, reproducible random streams.
// Every stochastic component draws from its own stream keyed by
// (base seed, optional index, purpose tag) so that e.g. anomaly
// placement and sign choices never share state.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose) {
    return splitmix64(splitmix64(base) ^ fnv1a64(purpose));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                                 std::string_view purpose) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 0x51ed270b0753afa1ULL) ^
                      fnv1a64(purpose));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

} // namespace srrc
