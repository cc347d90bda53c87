#include "hawkes_abc/random.hpp"

#include <cmath>

namespace hawkes_abc {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed, 0)) {}

std::uint64_t RandomStream::next_u64() { return engine_(); }

double RandomStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
    double u = 0.0;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomStream::normal(double mean, double sd) { return mean + sd * normal_(engine_); }

double RandomStream::exponential(double rate) { return -std::log(uniform_open()) / rate; }

bool RandomStream::bernoulli(double p) { return uniform() < p; }

RandomStream RandomStream::derive(std::uint64_t index) const {
    return RandomStream(mix_seed(seed_, index + 1));
}

}  // namespace hawkes_abc
