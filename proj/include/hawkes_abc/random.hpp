#pragma once

#include <cstdint>
#include <random>

namespace hawkes_abc {

/// SplitMix64 finaliser; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Deterministic pseudo-random stream. Same seed and same call sequence give the
/// same draws. Not thread-safe: each execution context owns its own stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    double uniform(double lo, double hi);
    double normal(double mean, double sd);
    /// Exponential waiting time with the given rate.
    double exponential(double rate);
    bool bernoulli(double p);
    std::uint64_t next_u64();

    /// Independent stream keyed by (seed, index); does not advance this stream.
    RandomStream derive(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hawkes_abc
