#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace wb {

// 64-bit FNV-1a over bytes. Used for derived seeds and content hashes so that
// every stream is a pure function of (seed, tag) and never of call order.
inline uint64_t fnv1a(std::string_view s, uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t mix_seed(uint64_t seed, std::string_view tag) {
    uint64_t h = 14695981039346656037ull;
    for (int i = 0; i < 8; ++i) {
        h ^= static_cast<unsigned char>(seed >> (8 * i));
        h *= 1099511628211ull;
    }
    return fnv1a(tag, h);
}

// mt19937_64 plus hand-rolled distributions. The standard pins the engine's
// output exactly; the <random> distributions it does not, so none are used here.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Inclusive range.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int64_t>(eng_() % span);
    }

    double normal(double mu = 0.0, double sd = 1.0) {
        // Box-Muller, no caching: exactly two draws per call.
        double u1 = uniform01(), u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sd * r * std::cos(6.283185307179586 * u2);
    }

    // Inversion; fine for the small means used here.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        double l = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > l && k < 100000);
        return k - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace wb
