#pragma once

#include <cstdint>
#include <limits>

namespace sgcov {

// SplitMix64 step; used for seeding and for deriving substreams.
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256** generator. Satisfies UniformRandomBitGenerator so it plugs
// into the <random> distributions.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1]; safe argument for log().
    double uniform_pos();
    // Exp(1) variate.
    double exponential();
    // Standard normal variate (Marsaglia polar method).
    double normal();
    // Poisson(mean) count.
    std::uint64_t poisson(double mean);

private:
    std::uint64_t s_[4];
};

// Independent stream for (master seed, index). Streams for distinct indices
// are decorrelated by two rounds of SplitMix64 mixing.
Rng substream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace sgcov
