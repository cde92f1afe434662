#pragma once

#include <cmath>
#include <cstdint>

namespace ldpe {

// 64-bit finalizer (splitmix64's output scrambler). Bijective; used both as
// the RNG step and to derive independent seeds/streams from (seed, tag) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derive a stream value from a seed and up to three tags. Feeding each tag
// through mix64 before combining keeps low-entropy tags (0, 1, 2, ...) from
// producing correlated streams.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a) {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (a + 1));
}
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
}
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                               std::uint64_t c) {
    return derive(derive(seed, a, b), c);
}

// Minimal deterministic RNG (splitmix64). Chosen over std::mt19937_64 so that
// every draw — including uniform ints and normals — is reproducible across
// standard libraries, which the byte-identical-output contract requires.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1): 53 random mantissa bits.
    double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]: never returns 0, so 1/u is always finite.
    double uniform_open01() {
        return (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) by rejection on the top bits; exact and
    // platform-independent.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t mask = mask_for(n);
        std::uint64_t v;
        do {
            v = u64() & mask;
        } while (v >= n);
        return v;
    }

    // Standard normal via Box-Muller (deterministic; caches the second draw).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    static std::uint64_t mask_for(std::uint64_t n) {
        std::uint64_t m = n - 1;
        m |= m >> 1;
        m |= m >> 2;
        m |= m >> 4;
        m |= m >> 8;
        m |= m >> 16;
        m |= m >> 32;
        return m;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stateless uniform in [0, 1) addressed by (seed, tags): the same coordinates
// always yield the same value. This is what lets user pools evaluate any
// user's sample lazily in any order.
inline double uniform01_at(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return static_cast<double>(derive(seed, a, b) >> 11) * 0x1.0p-53;
}

}  // namespace ldpe
