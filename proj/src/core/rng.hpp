#pragma once

#include <cstdint>
#include <initializer_list>

namespace r3net {

// All randomness in the library flows through this generator so that results
// are reproducible from a single 64-bit seed. Streams for matrices, samples
// and trials are derived with derive_seed(master, {tags...}); the tags keep
// independent consumers (weight draws, input draws, RIC probes) decoupled
// regardless of evaluation order.
//
// Engine: xoshiro256** seeded through splitmix64. Gaussian variates use the
// Marsaglia polar method. None of this depends on libstdc++ distribution
// internals, so seeded outputs are stable across toolchains.

std::uint64_t splitmix64_next(std::uint64_t& state);

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double next_double();

    // Standard normal N(0, 1).
    double next_gaussian();

    // Uniform integer in [0, bound), bound >= 1. Rejection sampled, unbiased.
    std::uint64_t next_index(std::uint64_t bound);

private:
    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace r3net
