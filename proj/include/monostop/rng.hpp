#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace monostop {

// SplitMix64 (Steele, Lea, Flood). Used for seeding the main generator and
// for the counter-based per-path seed derivation.
struct SplitMix64 {
    std::uint64_t state;

    constexpr explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// Per-path seed stream: path i under root seed s gets
// SplitMix64(s + GOLDEN * (i + 1)).next(). This scheme is fixed; results are
// reproducible for a given (root seed, path index) independent of evaluation
// order, which is what makes common-random-number comparisons and parallel
// aggregation bit-stable.
inline std::uint64_t path_seed(std::uint64_t root, std::uint64_t index) {
    return SplitMix64(root + 0x9E3779B97F4A7C15ull * (index + 1)).next();
}

// xoshiro256++ 1.0 (Blackman, Vigna), seeded through SplitMix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : state_) w = sm.next();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0,1); never returns 0 or 1, so logs are safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    bool bernoulli(double p) { return uniform01() <= p; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
};

}  // namespace monostop
