#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hawkes_abc/config.hpp"
#include "hawkes_abc/distortion.hpp"
#include "hawkes_abc/hawkes.hpp"
#include "hawkes_abc/inference.hpp"

namespace hawkes_abc {

/// A simulated ground-truth record together with its distorted observation.
struct Scenario {
    std::string name;
    HawkesParams truth;
    EventSequence complete;
    EventSequence observed;
    Distortion distortion;
};

/// First n events of a simulation; the window ends at the n-th event. The
/// horizon starts at 3n / (mu / (1 - K)) and doubles until n events occur.
EventSequence simulate_first_events(const HawkesParams& truth, std::size_t n, RandomStream& rng);

/// Gap spanning the first-th through last-th events (1-based) of a record.
Gap gap_between_events(const EventSequence& events, std::size_t first, std::size_t last);

Scenario no_distortion_scenario(const HawkesParams& truth, double horizon, std::uint64_t seed);
/// First n_events of a long simulation; events first..last are deleted by a time gap.
Scenario gap_scenario(const HawkesParams& truth, std::size_t n_events, std::size_t first,
                      std::size_t last, std::uint64_t seed);
Scenario linear_detection_scenario(const HawkesParams& truth, double horizon, double a, double b,
                                   std::uint64_t seed);
Scenario noise_scenario(const HawkesParams& truth, double horizon, double sigma, std::uint64_t seed);

SummaryCalculator make_summary_calculator(const ExperimentConfig& cfg, const EventSequence& observed);

/// Thresholds chosen for an ABC run and where they came from.
struct ThresholdPlan {
    Thresholds eps;
    std::optional<PilotReport> pilot;
    /// Pilot draw used to start the chains when no init is configured.
    std::optional<HawkesParams> start;
};

ThresholdPlan plan_thresholds(const EventSequence& observed, const ExperimentConfig& cfg,
                              const SummaryCalculator& summaries, RandomStream& rng);

struct AbcRun {
    ThresholdPlan plan;
    std::vector<Chain> chains;
};

/// Pilot/thresholds then cfg.chains independent ABC chains (run concurrently).
AbcRun run_abc(const EventSequence& observed, const ExperimentConfig& cfg);

/// cfg.chains independent exact-likelihood chains; honours cfg.truncate.
std::vector<Chain> run_exact(const EventSequence& events, const ExperimentConfig& cfg);

/// Posterior summary over the retained samples of several chains.
PosteriorSummary pooled_summary(const std::vector<Chain>& chains, std::size_t burn_in, std::size_t thin);

}  // namespace hawkes_abc
