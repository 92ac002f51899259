#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace encergy {

// Deterministic PRNG (splitmix64 core). The generator and the distributions
// are owned by this project so that seeded corpora, probes and fit restarts
// reproduce byte-identically regardless of the standard library build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, bound), bound > 0.
    std::uint64_t below(std::uint64_t bound);

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi);

    // Standard normal via Box-Muller; no carried state between calls.
    double normal();

private:
    std::uint64_t state_;
};

// Order-sensitive combination of seed parts into one 64-bit seed.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// FNV-1a over raw bytes / text, chainable through the h argument.
std::uint64_t hash_bytes(const void* data, std::size_t len,
                         std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t hash_str(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull);

} // namespace encergy
