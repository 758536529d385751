#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ivkg::rng {

// Every generator in the project draws from std::mt19937_64 through these
// helpers so output depends only on the seed, not on the standard library's
// distribution implementations.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the i-th independent stream derived from a global seed.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (stream + 0x632be59bd9b4e019ULL));
}

// Uniform in [0, 1).
inline double uniform01(Engine& e) { return double(e() >> 11) * 0x1.0p-53; }

inline double uniform(Engine& e, double lo, double hi) { return lo + (hi - lo) * uniform01(e); }

// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
inline std::uint64_t index(Engine& e, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = e();
    while (x >= limit);
    return x % n;
}

// Marsaglia polar method; the spare draw is discarded to keep the stream stateless.
inline double normal(Engine& e) {
    double u, v, s;
    do {
        u = 2.0 * uniform01(e) - 1.0;
        v = 2.0 * uniform01(e) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

template <class It>
void shuffle(It first, It last, Engine& e) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = index(e, i);
        std::swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
    }
}

}  // namespace ivkg::rng
