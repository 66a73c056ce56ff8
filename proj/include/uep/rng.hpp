#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace uep {

// Fixed, portable random number generation. All randomness in this library
// (code construction, interleavers, info bits, noise) flows through the two
// generators below so that a seed reproduces the exact same bit streams on
// any platform. Test vectors are frozen in tests/test_ldpc_core.cpp.

// splitmix64: used for seeding and for deriving child streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derive a child seed from a parent seed and a stream index. Used for the
// master seed -> per-SNR-point -> per-frame hierarchy in the simulator.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    std::uint64_t s = parent ^ (0x9E3779B97F4A7C15ull * (stream + 1));
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return a ^ (b << 1 | b >> 63);
}

// xoshiro256** by Blackman/Vigna (public domain algorithm), seeded with
// four successive splitmix64 outputs of the 64-bit seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64_next(x);
        have_cached_normal_ = false;
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

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) by rejection; bias-free for any bound.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
        const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Standard normal via Box-Muller; one cached value per pair.
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        // u1 in (0,1] so the log is finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        have_cached_normal_ = true;
        return r * std::cos(a);
    }

    // Rayleigh fading amplitude with E[h^2] = 1.
    double rayleigh() {
        const double u = 1.0 - uniform01();
        return std::sqrt(-std::log(u));
    }

    // In-place Fisher-Yates using next_below; portable unlike std::shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = std::size_t(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

} // namespace uep
