#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace lsksvd {

// Seeded draws pinned to explicit arithmetic on the mt19937_64 stream, so
// outputs do not depend on standard-library distribution internals.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

inline double normal01(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[bounded(rng, i)]);
    }
}

} // namespace lsksvd
