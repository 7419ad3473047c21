// Reproducible random number generation.
//
// Every random quantity in this library is drawn from a SeededRng so that a
// run is a pure function of its seed. The generator is pinned to a concrete,
// documented algorithm (xoshiro256++ seeded via SplitMix64) instead of
// std::mt19937 / std::normal_distribution, whose outputs are not guaranteed
// to be identical across standard library implementations.
//
// Stream splitting: derive(label) produces an independent generator whose
// seed is splitmix64(splitmix64(seed) ^ fnv1a64(label)). Parallel jobs each
// derive their own stream, so results do not depend on scheduling.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

namespace eqlab {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed) {
        // Expand the 64-bit seed into the 256-bit xoshiro state.
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = detail::splitmix64(s);
            w = s;
        }
    }

    std::uint64_t seed() const { return seed_; }

    // Independent stream tied to (seed, label); position-independent, so the
    // same label always yields the same stream regardless of prior draws.
    SeededRng derive(std::string_view label) const {
        return SeededRng(detail::splitmix64(detail::splitmix64(seed_) ^ detail::fnv1a64(label)));
    }

    // xoshiro256++
    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n); n must be > 0. Modulo reduction: the bias is
    // below 2^-53 for every n used here and the mapping is deterministic.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    std::uint8_t next_bit() { return static_cast<std::uint8_t>(next_u64() >> 63); }

    // Standard normal pair via Box-Muller; u1 is kept in (0, 1] so the log is finite.
    std::pair<double, double> gaussian_pair() {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        auto [a, b] = gaussian_pair();
        spare_ = b;
        has_spare_ = true;
        return a;
    }

  private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace eqlab
