#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qcopt {

/// splitmix64 finalizer; used to derive independent seeds from (seed, index) pairs.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t index, uint64_t salt = 0) {
    return mix64(seed ^ mix64(index + 1) ^ mix64(salt * 0x517cc1b727220a95ULL));
}

/// Deterministic RNG. mt19937_64's raw output sequence is fixed by the standard;
/// the derived draws below avoid libstdc++-specific distribution code so that
/// identical seeds give identical streams on any platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, n). Rejection sampling, no modulo bias. n must be > 0.
    uint64_t uniform_u64(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(uniform_u64(static_cast<uint64_t>(hi - lo) + 1));
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform_double(double lo, double hi) { return lo + (hi - lo) * uniform_double(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_u64(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[uniform_u64(v.size())];
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace qcopt
