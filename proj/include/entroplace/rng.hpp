#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace entroplace {

// Counter-based randomness.  Every draw is a pure function of (key, counter),
// so parallel loops can pull sample i without sharing generator state and the
// stream is identical across platforms and thread counts.  std::mt19937 is
// avoided because the standard leaves normal_distribution unspecified.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stafford mix13 finalizer, the splitmix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Derive a stage sub-seed from a global seed and a stage tag, so pipeline
// stages can rerun independently yet reproducibly.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a offset basis
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(seed + kGolden * h);
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return mix64(key_ + counter * kGolden + kGolden);
    }

    // Uniform in [0, 1); 53 mantissa bits, never exactly 1.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1), safe as a log argument.
    double uniform_open(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    double normal(std::uint64_t counter) const {
        const double u1 = uniform_open(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Standard Gumbel, for Gumbel-top-k sampling.
    double gumbel(std::uint64_t counter) const {
        return -std::log(-std::log(uniform_open(counter)));
    }

private:
    std::uint64_t key_;
};

// Sequential generator for places where a stream is more natural than a
// counter (shuffles, bootstrap index draws).  splitmix64.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

private:
    std::uint64_t state_;
};

} // namespace entroplace
