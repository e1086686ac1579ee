#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include "tsam/errors.hpp"

namespace tsam {

// Deterministic PRNG stack. One root seed drives everything; independent
// consumers (episode sampling, parameter init, synthetic data) each derive a
// named substream so adding a consumer never perturbs the others.
//
//   generator : xoshiro256** 1.0 (Blackman/Vigna) -- 64-bit xor/shift/rotate
//   seeding   : splitmix64 expansion of the 64-bit seed
//   substream : seed' = splitmix64(root_seed XOR fnv1a64(name))

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    Rng substream(std::string_view name) const {
        std::uint64_t sm = seed_of_;
        (void)sm;
        return Rng(derive_seed(seed_of_, name));
    }

    static Rng from_root(std::uint64_t root_seed, std::string_view name) {
        return Rng(derive_seed(root_seed, name));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log argument.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (two uniforms per draw, no caching, so
    /// the stream position is a pure function of the draw count).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Normal truncated to two standard deviations, then scaled.
    double trunc_normal(double stddev) {
        double z = normal();
        while (std::fabs(z) > 2.0) z = normal();
        return z * stddev;
    }

    /// Uniform integer in [0, n) (Lemire multiply-shift reduction).
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) throw ArgumentError("Rng::bounded: n must be positive");
        const unsigned __int128 m =
            static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        return static_cast<std::uint64_t>(m >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices from [0, n), by partial Fisher-Yates; order random.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n)
            throw ArgumentError("sample_without_replacement: k exceeds population");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

  private:
    static std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
        std::uint64_t sm = root ^ fnv1a64(name);
        return splitmix64(sm);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    explicit Rng(std::uint64_t seed, int) : Rng(seed) {}

    std::uint64_t seed_of_ = 0;  // retained for substream derivation
    std::uint64_t state_[4] = {};

  public:
    // Root-seed bookkeeping: Rng(seed) records the seed so substream() can
    // derive children. Child streams derive grandchildren from their own seed.
    static Rng rooted(std::uint64_t seed) {
        Rng r(seed);
        r.seed_of_ = seed;
        return r;
    }
};

}  // namespace tsam
