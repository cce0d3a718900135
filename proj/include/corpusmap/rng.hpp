#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace corpusmap {

// Stateless mix of (seed, counter); equals the counter-th output of a
// splitmix64 stream seeded with `seed`. Used where draws must depend only on
// a stable index, not on evaluation order.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t x = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Top 53 bits to a double in [0, 1).
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Uniform draw on [-spread, spread] keyed by (seed, counter).
inline double counter_uniform_symmetric(std::uint64_t seed, std::uint64_t counter, double spread) {
    return spread * (2.0 * unit_double(counter_hash(seed, counter)) - 1.0);
}

// Sequential generator on top of mt19937_64. The standard pins the engine's
// output sequence, and the transformations below avoid std distributions,
// whose results vary across library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return unit_double(engine_()); }

    // [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller, one fresh pair of uniforms per call.
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform integer in [0, n), n >= 1, via 128-bit multiply-shift.
    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace corpusmap
