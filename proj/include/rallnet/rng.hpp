#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace rallnet {

// SplitMix64 finalizer. Used both as the seed mixer for derived streams
// (master seed + indices -> substream seed) and to decorrelate raw seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stable derivation of a substream seed from a master seed and a tuple of
// indices. Chained SplitMix64 over each part; order-sensitive.
inline std::uint64_t mix_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : parts) s = splitmix64(s ^ p);
    return s;
}

// Deterministic RNG: mt19937_64 (bit-exact per the standard) plus hand-rolled
// distribution transforms, since std:: distributions are not portable across
// standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; consumes two uniforms per call.
    double normal(double mean, double stddev) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();  // log(0) guard
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Exponential with the given rate (mean 1/rate).
    double exponential(double rate) {
        return -std::log1p(-uniform01()) / rate;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace rallnet
