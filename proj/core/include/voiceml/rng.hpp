#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace voiceml {

// splitmix64 step; used to derive independent seeds from (seed, index) pairs
// so parallel workers never share an engine stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// The std:: distributions are implementation-defined; these helpers pin the
// exact draw sequence so seeded results are stable across standard libraries.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_real(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

// Box-Muller (cosine branch only, one draw per call).
inline double gaussian(std::mt19937_64& eng) {
    double u1 = 1.0 - uniform01(eng);  // (0, 1]
    double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <class T>
void shuffle_inplace(std::vector<T>& v, std::mt19937_64& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace voiceml
