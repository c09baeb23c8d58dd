#pragma once

#include <array>
#include <cstdint>

namespace gcph {

// xoshiro256++ seeded through splitmix64. Both algorithms are fully
// specified, so streams are bit-identical across platforms and compilers
// (std::mt19937 would be too, but the std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0,1) with 53 random mantissa bits.
    double uniform01();
    double uniform(double lo, double hi);
    // Inverse-CDF exponential with the given mean.
    double exponential(double mean);
    // Standard normal via Box-Muller; the spare value is cached.
    double normal();

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

private:
    std::array<std::uint64_t, 4> state_;
    double spare_normal_ = 0.0;
    bool have_spare_ = false;
};

// Derives an independent generator for (seed, stream). Streams keep draws
// for one purpose insensitive to draws made for another: adding a feature
// must not perturb existing columns or event times.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

} // namespace gcph
