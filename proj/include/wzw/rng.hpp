#pragma once

#include <cstdint>
#include <random>

namespace wzw::rng {

// Default seed spells "WZW1" in ASCII.
inline constexpr std::uint64_t default_seed = 0x575A5731ull;

// splitmix64, used to derive independent per-chunk / per-instance streams
// from a master seed without correlation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x632D5741ull));
}

inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(derive(seed, stream));
}

}  // namespace wzw::rng
