#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hawkes_abc/random.hpp"

namespace hawkes_abc {

/// theta = (mu, K, beta): background rate, branching ratio, kernel decay rate.
struct HawkesParams {
    double mu{0.0};
    double K{0.0};
    double beta{0.0};

    /// mu > 0, beta > 0, 0 <= K < 1, all finite.
    bool valid() const noexcept;
    /// Throws DomainError when !valid().
    void validate() const;

    friend bool operator==(const HawkesParams&, const HawkesParams&) = default;
};

/// Exponential excitation kernel nu(z) = K * beta * exp(-beta * z).
/// Everything kernel-specific that does not rely on the Markov recursion goes
/// through value()/integral().
class ExponentialKernel {
public:
    ExponentialKernel(double K, double beta) : K_(K), beta_(beta) {}
    explicit ExponentialKernel(const HawkesParams& theta) : ExponentialKernel(theta.K, theta.beta) {}

    double value(double lag) const;
    /// Integral of value() over [0, length].
    double integral(double length) const;
    /// Jump in intensity caused by a single event.
    double jump() const noexcept { return K_ * beta_; }

private:
    double K_;
    double beta_;
};

/// Strictly increasing event times on the observation window [0, horizon].
class EventSequence {
public:
    /// Validates ordering and window membership; throws DomainError.
    EventSequence(std::vector<double> times, double horizon);
    explicit EventSequence(double horizon) : EventSequence({}, horizon) {}

    std::span<const double> times() const noexcept { return times_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    double operator[](std::size_t i) const { return times_[i]; }

    /// Events with t <= new_horizon, on the shorter window [0, new_horizon].
    EventSequence truncated(double new_horizon) const;
    /// First n events; the window ends at the n-th event time.
    EventSequence head(std::size_t n) const;

    friend bool operator==(const EventSequence&, const EventSequence&) = default;

private:
    std::vector<double> times_;
    double horizon_;
};

/// lambda(t) = mu + sum_{t_i < t} nu(t - t_i). Throws DomainError if t is outside [0, T].
double intensity(double t, const EventSequence& history, const HawkesParams& theta);

/// Integral of the intensity over [0, T].
double compensator(const EventSequence& events, const HawkesParams& theta);

/// Exact log-likelihood on [0, T]; O(N) via the exponential-kernel recursion.
double log_likelihood(const EventSequence& events, const HawkesParams& theta);

/// Ogata thinning on [0, horizon].
EventSequence simulate(const HawkesParams& theta, double horizon, RandomStream& rng);

/// Stationary expected count mu * T / (1 - K). Throws DomainError if K >= 1.
double expected_count(const HawkesParams& theta, double horizon);

}  // namespace hawkes_abc
