#pragma once

#include <cstdint>

namespace epigame {

// splitmix64 (Steele/Lea/Flood 2014). Pinned in reports as "splitmix64-v1".
// Streams derived from (seed, index) are independent of how work is
// partitioned, so parallel Monte Carlo merges are worker-count invariant.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Independent stream for a (seed, index) pair.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t salt = splitmix64_next(s) ^ (0x9E3779B97F4A7C15ull * (index + 1));
        return SplitMix64(salt);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

private:
    std::uint64_t state_;
};

inline const char* kPrngName = "splitmix64-v1";

}  // namespace epigame
