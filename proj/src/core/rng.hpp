#pragma once

#include <cmath>
#include <cstdint>

namespace eventalpha {

// SplitMix64 (Steele, Lea & Flood; public-domain constants). Chosen over
// the platform engines so fixtures reproduce bit-exactly across
// toolchains and language ports.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % n;
        }
    }

    // Box-Muller, always consuming exactly two draws so the stream
    // position is independent of the call pattern.
    double normal(double mean, double stddev) {
        double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; // (0, 1]
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

private:
    std::uint64_t state_;
};

} // namespace eventalpha
