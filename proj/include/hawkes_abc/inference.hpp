#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hawkes_abc/distortion.hpp"
#include "hawkes_abc/hawkes.hpp"
#include "hawkes_abc/random.hpp"
#include "hawkes_abc/summaries.hpp"

namespace hawkes_abc {

struct Interval {
    double lo{0.0};
    double hi{0.0};
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Independent uniform priors on (mu, K, beta).
struct UniformPrior {
    Interval mu{0.05, 0.85};
    Interval K{0.0, 0.9};
    Interval beta{0.1, 3.0};

    void validate() const;
    bool contains(const HawkesParams& theta) const noexcept;
    double volume() const noexcept;
    HawkesParams sample(RandomStream& rng) const;
    friend bool operator==(const UniformPrior&, const UniformPrior&) = default;
};

/// Independent Gaussian random-walk step sizes.
struct ProposalKernel {
    double mu_sd{0.05};
    double K_sd{0.05};
    double beta_sd{0.2};

    void validate() const;
    friend bool operator==(const ProposalKernel&, const ProposalKernel&) = default;
};

/// Parameters held at a known value instead of being sampled.
struct FixedParameters {
    std::optional<double> mu;
    std::optional<double> K;
    std::optional<double> beta;

    HawkesParams apply(HawkesParams theta) const noexcept;
    bool any() const noexcept { return mu || K || beta; }
};

struct ChainSample {
    std::size_t iter{0};
    HawkesParams theta;
    bool accepted{false};
};

struct Chain {
    std::vector<ChainSample> samples;
    UniformPrior prior;
    ProposalKernel kernel;
    std::optional<Thresholds> thresholds;
    std::uint64_t seed{0};
};

/// -log(volume) inside the prior box, -infinity outside.
double prior_logdensity(const HawkesParams& theta, const UniformPrior& prior);

/// Symmetric Gaussian random-walk step. The candidate may leave the prior support.
HawkesParams propose(const HawkesParams& theta, const ProposalKernel& kernel, RandomStream& rng);

// ---------------------------------------------------------------------------
// Pilot run and threshold calibration

inline constexpr std::size_t kDefaultPilotSize = 5000;
inline constexpr std::pair<double, double> kDefaultAcceptanceBand{0.0001, 0.001};
inline const std::vector<double> kDefaultScaleGrid{2.0, 1.5, 1.0, 0.75, 0.5, 0.35, 0.25, 0.15, 0.1, 0.05};

/// Prior-predictive draws: theta, and its summary (nullopt when degenerate).
struct PilotSample {
    std::vector<HawkesParams> thetas;
    std::vector<std::optional<SummaryVector>> summaries;
};

struct PilotOptions {
    std::vector<double> scale_grid = kDefaultScaleGrid;
    /// Held fixed in every pilot draw, matching the sampler that will use the thresholds.
    FixedParameters fixed;
    /// Worker threads for the simulations; 0 picks hardware concurrency.
    unsigned threads = 0;
};

struct PilotReport {
    std::size_t n_pilot{0};
    std::size_t n_degenerate{0};
    std::vector<double> sd;
    double scale{0.0};
    Thresholds thresholds;
    double acceptance{0.0};
    /// False when no grid point landed in the target band and the closest was taken.
    bool in_band{false};
    std::pair<double, double> band{kDefaultAcceptanceBand};
    /// (scale, acceptance) for every grid point, in grid order.
    std::vector<std::pair<double, double>> grid_acceptance;
    /// Pilot draw whose summaries are closest to the observed ones (max |dS_p| / sd_p).
    std::optional<HawkesParams> best_theta;
};

/// Simulates n draws from the prior predictive: theta ~ prior, Z ~ Hawkes(theta) on
/// [0, horizon], Y = h(Z), S(Y). Draw i uses its own stream derived from one value
/// taken from rng, so the result does not depend on the thread count.
PilotSample run_pilot(double horizon, const Distortion& d, const UniformPrior& prior,
                      const SummaryCalculator& summaries, std::size_t n, RandomStream& rng,
                      const PilotOptions& options = {});

/// Fraction of pilot draws passing accept_candidate (degenerate draws fail).
double pilot_acceptance(const PilotSample& pilot, const SummaryVector& observed, const Thresholds& eps);

/// Grid search over eps = c * sd for the smallest c whose acceptance falls in band.
PilotReport calibrate_from_pilot(const PilotSample& pilot, const SummaryVector& observed,
                                 std::pair<double, double> band, const std::vector<double>& scale_grid);

PilotReport pilot_calibrate(const EventSequence& observed, const Distortion& d, const UniformPrior& prior,
                            const SummaryCalculator& summaries, std::size_t n_pilot,
                            std::pair<double, double> band, RandomStream& rng,
                            const PilotOptions& options = {});

// ---------------------------------------------------------------------------
// Samplers

struct SamplerOptions {
    /// Starting point; drawn from the prior when absent.
    std::optional<HawkesParams> initial;
    FixedParameters fixed;
};

/// ABC-MCMC: propose, simulate, distort, summarise, accept when every statistic is
/// within its threshold (then a Metropolis-Hastings step on the prior ratio).
Chain abc_mcmc(const EventSequence& observed, const Distortion& d, const UniformPrior& prior,
               const ProposalKernel& kernel, const SummaryCalculator& summaries,
               const Thresholds& eps, std::size_t iterations, RandomStream& rng,
               const SamplerOptions& options = {});

using LogLikelihoodFn = std::function<double(const EventSequence&, const HawkesParams&)>;

struct ExactMhOptions : SamplerOptions {
    /// Replaces log_likelihood(); intended for tests.
    LogLikelihoodFn log_likelihood;
};

/// Random-walk Metropolis-Hastings on prior x exact likelihood.
Chain exact_mh(const EventSequence& events, const UniformPrior& prior, const ProposalKernel& kernel,
               std::size_t iterations, RandomStream& rng, const ExactMhOptions& options = {});

struct ParameterSummary {
    double mean{0.0};
    double sd{0.0};
};

struct PosteriorSummary {
    ParameterSummary mu;
    ParameterSummary K;
    ParameterSummary beta;
    double acceptance_rate{0.0};
    std::size_t retained{0};
};

/// Default burn-in: the first 20% of the chain.
std::size_t default_burn_in(std::size_t chain_length) noexcept;

/// Mean and sample standard deviation over samples[burn_in::thin].
PosteriorSummary posterior_summary(const Chain& chain, std::size_t burn_in, std::size_t thin = 1);

}  // namespace hawkes_abc
