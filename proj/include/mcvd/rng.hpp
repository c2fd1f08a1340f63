#pragma once

#include <cstdint>

namespace mcvd {

/// SplitMix64 step: advances `state` and returns the next mixed value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Child seed as a pure function of (parent seed, index).
///
/// Seeds form a tree: master -> per-trial -> per-molecule. Any worker can
/// reconstruct any stream from (master, trial, molecule) alone, which is what
/// makes results independent of scheduling and thread count.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    std::uint64_t s = parent + 0x9E3779B97F4A7C15ULL * (index + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x94D049BB133111EBULL);
}

/// xoshiro256++ engine (Blackman & Vigna), seeded via SplitMix64.
class Xoshiro256pp {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // UniformRandomBitGenerator interface.
    std::uint64_t operator()() { return next(); }
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

/// Standard-normal sampler over an owned xoshiro256++ stream.
///
/// Uses the ziggurat method (128 layers, Doornik's formulation) so the
/// per-draw cost stays near two raw generator calls. Exact N(0,1): the wedge
/// and tail cases fall back to explicit density evaluation.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double normal();
    double uniform01() { return rng_.uniform01(); }
    Xoshiro256pp& engine() { return rng_; }

  private:
    double tail(bool negative);

    Xoshiro256pp rng_;
};

}  // namespace mcvd
