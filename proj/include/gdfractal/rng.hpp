#pragma once

// Seeded, platform-stable PRNG: xoshiro256** with splitmix64 state expansion.
// Uniform doubles take the top 53 bits, so streams are reproducible across
// compilers and standard libraries for a given seed.

#include <cmath>
#include <cstdint>

#include "gdfractal/linalg.hpp"

namespace gdfractal {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
   public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& s : s_) s = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one value per call, no caching.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    Vec normal_vec(int n) {
        Vec v(n);
        for (double& x : v) x = normal();
        return v;
    }

    Vec uniform_vec(int n, double lo, double hi) {
        Vec v(n);
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

   private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Seeded random matrix with orthonormal columns (Gaussian entries, then
// modified Gram-Schmidt). Used for slice frames; deterministic per seed.
inline Mat random_orthonormal_columns(int rows, int cols, std::uint64_t seed) {
    if (cols > rows) throw std::invalid_argument("random_orthonormal_columns: cols > rows");
    Rng rng(seed);
    Mat m(rows, cols);
    for (double& x : m.a) x = rng.normal();
    orthonormalize_columns(m);
    return m;
}

}  // namespace gdfractal
