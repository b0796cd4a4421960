#pragma once

// Deterministic, platform-independent RNG. Each Monte Carlo replication gets
// its own xoshiro256** stream derived from (seed, stream-id), so aggregation
// order and worker count never change the drawn values.

#include <array>
#include <cstdint>

namespace hoexp {

struct SplitMix64 {
    std::uint64_t state;
    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Xoshiro256ss {
  public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : state_) w = sm.next();
    }

    std::uint64_t next() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
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

    // Uniform on the open interval (0,1): never returns 0 or 1, so quantile
    // transforms stay finite.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::array<std::uint64_t, 4> state_;
};

inline Xoshiro256ss make_stream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm{seed};
    std::uint64_t base = sm.next();
    return Xoshiro256ss(base + 0xD1B54A32D192ED03ULL * (stream + 1));
}

}  // namespace hoexp
