#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "hawkes_abc/hawkes.hpp"
#include "hawkes_abc/random.hpp"

namespace hawkes_abc {

struct NoDistortion {
    friend bool operator==(const NoDistortion&, const NoDistortion&) = default;
};

/// Nothing is detected for start <= t <= end.
struct Gap {
    double start{0.0};
    double end{0.0};
    friend bool operator==(const Gap&, const Gap&) = default;
};

/// Event at t is kept with probability h(t) = 1 - (a + b * t / T).
struct LinearDetection {
    double a{0.0};
    double b{0.0};
    friend bool operator==(const LinearDetection&, const LinearDetection&) = default;
};

/// Observed time t + eps, eps ~ N(0, sigma^2).
struct GaussianNoise {
    double sigma{0.0};
    friend bool operator==(const GaussianNoise&, const GaussianNoise&) = default;
};

/// Observed time t + c.
struct FixedDelay {
    double c{0.0};
    friend bool operator==(const FixedDelay&, const FixedDelay&) = default;
};

/// The distortion h(.) that turns the true event record into the observed one.
/// Its parameters are treated as known.
using Distortion = std::variant<NoDistortion, Gap, LinearDetection, GaussianNoise, FixedDelay>;

/// True for variants that only delete events (None, Gap, LinearDetection).
bool is_missingness(const Distortion& d) noexcept;

/// Throws ConfigError if d cannot be applied on [0, horizon].
void validate(const Distortion& d, double horizon);

/// Applies h(.) to the true events. Noise and delay results are re-sorted and
/// anything pushed outside [0, T] is dropped.
EventSequence distort(const EventSequence& events, const Distortion& d, RandomStream& rng);

/// Detection probability for the missingness variants; DomainError for noise/delay.
double detection_prob(double t, const Distortion& d, double horizon);

/// Text form used in config files and reports, e.g. "gap 1.5 2.5", "noise 0.5".
std::string to_string(const Distortion& d);
/// Inverse of to_string(); throws ConfigError on malformed input.
Distortion parse_distortion(std::string_view text);

}  // namespace hawkes_abc
