#include "hawkes_abc/experiments.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "hawkes_abc/errors.hpp"

namespace hawkes_abc {

namespace {

// Runs body(k) for k in [0, n) on separate threads; the first exception wins.
template <class Body>
void for_each_chain(unsigned n, Body body) {
    if (n == 1) {
        body(0u);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> workers;
        for (unsigned k = 0; k < n; ++k) {
            workers.emplace_back([&, k] {
                try {
                    body(k);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace

Gap gap_between_events(const EventSequence& events, std::size_t first, std::size_t last) {
    if (first == 0 || !(first < last) || last > events.size()) {
        throw ConfigError("gap event indices must satisfy 1 <= first < last <= " + std::to_string(events.size()));
    }
    return Gap{events[first - 1], events[last - 1]};
}

Scenario no_distortion_scenario(const HawkesParams& truth, double horizon, std::uint64_t seed) {
    RandomStream rng(seed);
    EventSequence complete = simulate(truth, horizon, rng);
    return {"no-distortion", truth, complete, complete, NoDistortion{}};
}

EventSequence simulate_first_events(const HawkesParams& truth, std::size_t n, RandomStream& rng) {
    truth.validate();
    if (n == 0) throw ConfigError("event count must be at least 1");
    for (double horizon = 3.0 * static_cast<double>(n) / expected_count(truth, 1.0);; horizon *= 2.0) {
        const EventSequence full = simulate(truth, horizon, rng);
        if (full.size() >= n) return full.head(n);
    }
}

Scenario gap_scenario(const HawkesParams& truth, std::size_t n_events, std::size_t first, std::size_t last,
                      std::uint64_t seed) {
    RandomStream rng(seed);
    EventSequence complete = simulate_first_events(truth, n_events, rng);
    const Gap gap = gap_between_events(complete, first, last);
    EventSequence observed = distort(complete, gap, rng);
    return {"gap", truth, std::move(complete), std::move(observed), gap};
}

Scenario linear_detection_scenario(const HawkesParams& truth, double horizon, double a, double b,
                                   std::uint64_t seed) {
    RandomStream rng(seed);
    EventSequence complete = simulate(truth, horizon, rng);
    const LinearDetection d{a, b};
    EventSequence observed = distort(complete, d, rng);
    return {"linear-detection", truth, std::move(complete), std::move(observed), d};
}

Scenario noise_scenario(const HawkesParams& truth, double horizon, double sigma, std::uint64_t seed) {
    RandomStream rng(seed);
    EventSequence complete = simulate(truth, horizon, rng);
    const GaussianNoise d{sigma};
    EventSequence observed = distort(complete, d, rng);
    return {"noise", truth, std::move(complete), std::move(observed), d};
}

SummaryCalculator make_summary_calculator(const ExperimentConfig& cfg, const EventSequence& observed) {
    return cfg.family == SummaryFamily::Abc7 ? SummaryCalculator::abc7(cfg.ripley_windows)
                                             : SummaryCalculator::alt2(observed);
}

ThresholdPlan plan_thresholds(const EventSequence& observed, const ExperimentConfig& cfg,
                              const SummaryCalculator& summaries, RandomStream& rng) {
    ThresholdPlan plan;
    const std::size_t P = summaries.dimension();
    if (cfg.eps) {
        plan.eps.eps = *cfg.eps;
        return plan;
    }
    if (cfg.eps_scale && std::isinf(*cfg.eps_scale)) {
        plan.eps.eps.assign(P, std::numeric_limits<double>::infinity());
        return plan;
    }
    PilotOptions options;
    options.fixed = cfg.fixed;
    options.scale_grid = cfg.eps_scale ? std::vector<double>{*cfg.eps_scale} : cfg.scale_grid;
    PilotReport report = pilot_calibrate(observed, cfg.distortion, cfg.prior, summaries, cfg.pilot_size, cfg.band,
                                         rng, options);
    plan.eps = report.thresholds;
    plan.start = report.best_theta;
    plan.pilot = std::move(report);
    return plan;
}

AbcRun run_abc(const EventSequence& observed, const ExperimentConfig& cfg) {
    cfg.validate();
    validate(cfg.distortion, observed.horizon());
    const SummaryCalculator summaries = make_summary_calculator(cfg, observed);
    RandomStream rng(cfg.seed);

    AbcRun run;
    run.plan = plan_thresholds(observed, cfg, summaries, rng);
    SamplerOptions options;
    options.initial = cfg.init ? cfg.init : run.plan.start;
    options.fixed = cfg.fixed;

    run.chains.resize(cfg.chains);
    for_each_chain(cfg.chains, [&](unsigned k) {
        RandomStream stream = rng.derive(k);
        run.chains[k] = abc_mcmc(observed, cfg.distortion, cfg.prior, cfg.kernel, summaries, run.plan.eps,
                                 cfg.iterations, stream, options);
    });
    return run;
}

std::vector<Chain> run_exact(const EventSequence& events, const ExperimentConfig& cfg) {
    cfg.validate();
    const EventSequence data = cfg.truncate ? events.truncated(*cfg.truncate) : events;
    const RandomStream rng(cfg.seed);
    ExactMhOptions options;
    options.initial = cfg.init;
    options.fixed = cfg.fixed;

    std::vector<Chain> chains(cfg.chains);
    for_each_chain(cfg.chains, [&](unsigned k) {
        RandomStream stream = rng.derive(k);
        chains[k] = exact_mh(data, cfg.prior, cfg.kernel, cfg.iterations, stream, options);
    });
    return chains;
}

PosteriorSummary pooled_summary(const std::vector<Chain>& chains, std::size_t burn_in, std::size_t thin) {
    if (chains.empty()) throw ConfigError("no chains to summarise");
    if (chains.size() == 1) return posterior_summary(chains.front(), burn_in, thin);
    Chain pooled;
    for (const auto& c : chains) {
        if (burn_in >= c.samples.size()) throw ConfigError("burn-in leaves no samples");
        for (std::size_t i = burn_in; i < c.samples.size(); i += thin) pooled.samples.push_back(c.samples[i]);
    }
    return posterior_summary(pooled, 0, 1);
}

}  // namespace hawkes_abc
