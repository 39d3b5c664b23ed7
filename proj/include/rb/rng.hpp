#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rb {

// All randomness in the library flows through this wrapper around
// std::mt19937_64. The engine itself is bit-exact per the standard; the
// distributions below are hand-rolled so that results do not depend on the
// standard library implementation. Reproducibility contract: identical seeds
// give identical streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller. Stateless: one draw consumes two
    // uniforms, keeping the stream position independent of call history.
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    // Exponential with rate lambda (mean 1/lambda).
    double exponential(double lambda) {
        double u;
        do {
            u = uniform01();
        } while (u <= 0.0);
        return -std::log(u) / lambda;
    }

    // Exact binomial sample by direct Bernoulli counting. Fine for the shot
    // counts used here (up to a few thousand).
    std::uint64_t binomial(std::uint64_t n, double p) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            if (uniform01() < p) ++hits;
        }
        return hits;
    }

  private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic child seed for a labelled substream, e.g. (seed, m, k).
// Sequence k of length m always sees the same stream no matter how work is
// scheduled across threads.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

}  // namespace rb
