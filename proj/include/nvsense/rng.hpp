#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nvsense {

// splitmix64 finalizer; used only for seed derivation, never as the run RNG.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent stream seed from a master seed and one or more tags.
// Distinct tag tuples give statistically independent streams, so consumers
// can draw in any order without perturbing each other.
constexpr std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
    return derive_seed(splitmix64(seed ^ splitmix64(tag + 0x632be59bd9b4e019ULL)), rest...);
}

// Stream tags used across the library (kept in one place to avoid collisions).
namespace rng_stream {
inline constexpr std::uint64_t kInit = 1;      // prior sampling
inline constexpr std::uint64_t kShots = 2;     // measurement outcomes
inline constexpr std::uint64_t kBatch = 3;     // control-batch sampling
inline constexpr std::uint64_t kResample = 4;  // Liu-West draws
inline constexpr std::uint64_t kSweep = 5;     // benchmark truth generation
}  // namespace rng_stream

// Deterministic RNG: the mt19937_64 engine is fully specified by the
// standard, and all distributions here are hand-rolled, so a given seed
// reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed) | 1ULL) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n); Lemire reduction (bias < n / 2^64).
    std::uint64_t integer(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(raw()) * n) >> 64);
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double a = 6.283185307179586477 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nvsense
