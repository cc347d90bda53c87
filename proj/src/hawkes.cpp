#include "hawkes_abc/hawkes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hawkes_abc/errors.hpp"

namespace hawkes_abc {

bool HawkesParams::valid() const noexcept {
    return std::isfinite(mu) && std::isfinite(K) && std::isfinite(beta) && mu > 0.0 && beta > 0.0 &&
           K >= 0.0 && K < 1.0;
}

void HawkesParams::validate() const {
    if (!valid()) {
        throw DomainError("invalid Hawkes parameters (mu=" + std::to_string(mu) + ", K=" + std::to_string(K) +
                          ", beta=" + std::to_string(beta) + "): need mu > 0, beta > 0, 0 <= K < 1");
    }
}

double ExponentialKernel::value(double lag) const {
    return lag < 0.0 ? 0.0 : K_ * beta_ * std::exp(-beta_ * lag);
}

double ExponentialKernel::integral(double length) const {
    return length <= 0.0 ? 0.0 : -K_ * std::expm1(-beta_ * length);
}

EventSequence::EventSequence(std::vector<double> times, double horizon)
    : times_(std::move(times)), horizon_(horizon) {
    if (!std::isfinite(horizon_) || horizon_ < 0.0) {
        throw DomainError("event sequence horizon must be finite and non-negative");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        const double t = times_[i];
        if (!std::isfinite(t) || t < 0.0 || t > horizon_) {
            throw DomainError("event " + std::to_string(i + 1) + " at t=" + std::to_string(t) +
                              " lies outside [0, " + std::to_string(horizon_) + "]");
        }
        if (i > 0 && !(times_[i - 1] < t)) {
            throw DomainError("event times must be strictly increasing (event " + std::to_string(i + 1) + ")");
        }
    }
}

EventSequence EventSequence::truncated(double new_horizon) const {
    if (!(new_horizon >= 0.0) || new_horizon > horizon_) {
        throw DomainError("truncation horizon must lie in [0, " + std::to_string(horizon_) + "]");
    }
    auto end = std::upper_bound(times_.begin(), times_.end(), new_horizon);
    return EventSequence(std::vector<double>(times_.begin(), end), new_horizon);
}

EventSequence EventSequence::head(std::size_t n) const {
    if (n == 0 || n > times_.size()) {
        throw DomainError("head(" + std::to_string(n) + ") on a sequence of " + std::to_string(times_.size()) +
                          " events");
    }
    return EventSequence(std::vector<double>(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(n)),
                         times_[n - 1]);
}

double intensity(double t, const EventSequence& history, const HawkesParams& theta) {
    if (!(t >= 0.0 && t <= history.horizon())) {
        throw DomainError("intensity evaluated at t=" + std::to_string(t) + " outside the window");
    }
    theta.validate();
    const ExponentialKernel kernel(theta);
    double lambda = theta.mu;
    for (double ti : history.times()) {
        if (!(ti < t)) break;
        lambda += kernel.value(t - ti);
    }
    return lambda;
}

double compensator(const EventSequence& events, const HawkesParams& theta) {
    theta.validate();
    const ExponentialKernel kernel(theta);
    const double T = events.horizon();
    double excitation = 0.0;
    for (double ti : events.times()) excitation += kernel.integral(T - ti);
    return theta.mu * T + excitation;
}

double log_likelihood(const EventSequence& events, const HawkesParams& theta) {
    theta.validate();
    const double jump = theta.K * theta.beta;
    // decayed = sum_{j<i} exp(-beta (t_i - t_j))
    double decayed = 0.0;
    double log_sum = 0.0;
    double previous = 0.0;
    bool first = true;
    for (double ti : events.times()) {
        if (!first) decayed = std::exp(-theta.beta * (ti - previous)) * (1.0 + decayed);
        log_sum += std::log(theta.mu + jump * decayed);
        previous = ti;
        first = false;
    }
    return log_sum - compensator(events, theta);
}

EventSequence simulate(const HawkesParams& theta, double horizon, RandomStream& rng) {
    theta.validate();
    if (!std::isfinite(horizon) || horizon < 0.0) {
        throw DomainError("simulation horizon must be finite and non-negative");
    }
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(expected_count(theta, horizon) * 1.2) + 8);

    const double jump = theta.K * theta.beta;
    double t = 0.0;
    // Excitation part of the intensity at t+ (right limit).
    double excitation = 0.0;
    for (;;) {
        // Intensity only decays until the next event, so lambda(t+) dominates.
        const double bound = theta.mu + excitation;
        const double wait = rng.exponential(bound);
        t += wait;
        if (t > horizon) break;
        excitation *= std::exp(-theta.beta * wait);
        const double lambda = theta.mu + excitation;
        if (rng.uniform() * bound <= lambda) {
            if (!times.empty() && !(times.back() < t)) continue;
            times.push_back(t);
            excitation += jump;
        }
    }
    return EventSequence(std::move(times), horizon);
}

double expected_count(const HawkesParams& theta, double horizon) {
    if (!(theta.K < 1.0)) throw DomainError("expected_count requires K < 1");
    return theta.mu * horizon / (1.0 - theta.K);
}

}  // namespace hawkes_abc
