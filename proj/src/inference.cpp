#include "hawkes_abc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "hawkes_abc/errors.hpp"

namespace hawkes_abc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool inside(const Interval& iv, double x) noexcept { return x >= iv.lo && x <= iv.hi; }

void check_interval(const Interval& iv, const char* name) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
        throw ConfigError(std::string("prior bounds for ") + name + " need finite lo < hi");
    }
}

HawkesParams initial_state(const UniformPrior& prior, const SamplerOptions& options, RandomStream& rng) {
    HawkesParams theta = options.fixed.apply(options.initial ? *options.initial : prior.sample(rng));
    if (!prior.contains(theta)) throw ConfigError("initial parameters lie outside the prior support");
    return theta;
}

void check_fixed(const FixedParameters& fixed, const UniformPrior& prior) {
    if ((fixed.mu && !inside(prior.mu, *fixed.mu)) || (fixed.K && !inside(prior.K, *fixed.K)) ||
        (fixed.beta && !inside(prior.beta, *fixed.beta))) {
        throw ConfigError("fixed parameter values must lie inside the prior bounds");
    }
}

// Accumulates deviations from the first value so constant samples give an exact mean and zero sd.
ParameterSummary summarize(const std::vector<double>& xs) {
    const double origin = xs.front();
    double sum = 0.0;
    for (double x : xs) sum += x - origin;
    const double n = static_cast<double>(xs.size());
    const double shift = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - origin - shift) * (x - origin - shift);
    const double sd = xs.size() < 2 ? 0.0 : std::sqrt(ss / (n - 1.0));
    return {origin + shift, sd};
}

// Distance from an acceptance rate to the band on a log scale; zero inside.
double band_distance(double acceptance, std::pair<double, double> band) {
    if (!(acceptance > 0.0)) return std::numeric_limits<double>::infinity();
    if (acceptance < band.first) return std::log(band.first / acceptance);
    if (acceptance > band.second) return std::log(acceptance / band.second);
    return 0.0;
}

}  // namespace

void UniformPrior::validate() const {
    check_interval(mu, "mu");
    check_interval(K, "K");
    check_interval(beta, "beta");
    if (mu.lo < 0.0 || beta.lo < 0.0) throw ConfigError("prior bounds for mu and beta must be non-negative");
    if (K.lo < 0.0 || K.hi >= 1.0) throw ConfigError("prior bounds for K must lie within [0, 1)");
}

bool UniformPrior::contains(const HawkesParams& theta) const noexcept {
    return theta.valid() && inside(mu, theta.mu) && inside(K, theta.K) && inside(beta, theta.beta);
}

double UniformPrior::volume() const noexcept {
    return (mu.hi - mu.lo) * (K.hi - K.lo) * (beta.hi - beta.lo);
}

HawkesParams UniformPrior::sample(RandomStream& rng) const {
    HawkesParams theta;
    // Rejects the measure-zero boundary draws mu = 0 or beta = 0.
    do {
        theta.mu = rng.uniform(mu.lo, mu.hi);
        theta.K = rng.uniform(K.lo, K.hi);
        theta.beta = rng.uniform(beta.lo, beta.hi);
    } while (!theta.valid());
    return theta;
}

void ProposalKernel::validate() const {
    for (double sd : {mu_sd, K_sd, beta_sd}) {
        if (!(sd > 0.0) || !std::isfinite(sd)) throw ConfigError("proposal standard deviations must be > 0");
    }
}

HawkesParams FixedParameters::apply(HawkesParams theta) const noexcept {
    if (mu) theta.mu = *mu;
    if (K) theta.K = *K;
    if (beta) theta.beta = *beta;
    return theta;
}

double prior_logdensity(const HawkesParams& theta, const UniformPrior& prior) {
    return prior.contains(theta) ? -std::log(prior.volume()) : kNegInf;
}

HawkesParams propose(const HawkesParams& theta, const ProposalKernel& kernel, RandomStream& rng) {
    return {rng.normal(theta.mu, kernel.mu_sd), rng.normal(theta.K, kernel.K_sd),
            rng.normal(theta.beta, kernel.beta_sd)};
}

PilotSample run_pilot(double horizon, const Distortion& d, const UniformPrior& prior,
                      const SummaryCalculator& summaries, std::size_t n, RandomStream& rng,
                      const PilotOptions& options) {
    prior.validate();
    validate(d, horizon);
    check_fixed(options.fixed, prior);

    PilotSample pilot;
    pilot.thetas.resize(n);
    pilot.summaries.resize(n);
    const RandomStream base(rng.next_u64());

    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream stream = base.derive(i);
            const HawkesParams theta = options.fixed.apply(prior.sample(stream));
            const EventSequence observed = distort(simulate(theta, horizon, stream), d, stream);
            pilot.thetas[i] = theta;
            pilot.summaries[i] = summaries.try_compute(observed);
        }
    };

    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        work(0, n);
        return pilot;
    }
    {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(n, w * chunk);
            const std::size_t end = std::min(n, begin + chunk);
            workers.emplace_back(work, begin, end);
        }
    }
    return pilot;
}

double pilot_acceptance(const PilotSample& pilot, const SummaryVector& observed, const Thresholds& eps) {
    if (pilot.summaries.empty()) return 0.0;
    std::size_t passed = 0;
    for (const auto& s : pilot.summaries) {
        if (s && accept_candidate(observed, *s, eps)) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(pilot.summaries.size());
}

PilotReport calibrate_from_pilot(const PilotSample& pilot, const SummaryVector& observed,
                                 std::pair<double, double> band, const std::vector<double>& scale_grid) {
    if (!(band.first >= 0.0 && band.first <= band.second && band.second <= 1.0)) {
        throw ConfigError("acceptance band must satisfy 0 <= low <= high <= 1");
    }
    if (scale_grid.empty()) throw ConfigError("scale grid is empty");
    const std::size_t P = observed.values.size();

    PilotReport report;
    report.n_pilot = pilot.summaries.size();
    report.band = band;

    std::vector<std::vector<double>> columns(P);
    for (const auto& s : pilot.summaries) {
        if (!s) {
            ++report.n_degenerate;
            continue;
        }
        for (std::size_t p = 0; p < P; ++p) columns[p].push_back(s->values[p]);
    }
    if (report.n_pilot - report.n_degenerate < 2) {
        throw CalibrationError("pilot run produced fewer than two usable summary vectors");
    }
    report.sd.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
        report.sd[p] = summarize(columns[p]).sd;
        if (!(report.sd[p] > 0.0) || !std::isfinite(report.sd[p])) {
            throw CalibrationError("summary statistic " + std::to_string(p + 1) + " has zero pilot variance");
        }
    }

    const auto thresholds_at = [&](double c) {
        Thresholds t;
        t.eps.resize(P);
        for (std::size_t p = 0; p < P; ++p) t.eps[p] = c * report.sd[p];
        return t;
    };

    std::optional<std::size_t> chosen;
    std::size_t closest = 0;
    double closest_distance = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < scale_grid.size(); ++g) {
        const double c = scale_grid[g];
        if (!(c > 0.0)) throw ConfigError("scale grid entries must be > 0");
        const double acc = pilot_acceptance(pilot, observed, thresholds_at(c));
        report.grid_acceptance.emplace_back(c, acc);
        const double dist = band_distance(acc, band);
        if (dist == 0.0 && (!chosen || c < scale_grid[*chosen])) chosen = g;
        if (dist < closest_distance) {
            closest_distance = dist;
            closest = g;
        }
    }
    report.in_band = chosen.has_value();
    const std::size_t pick = chosen.value_or(closest);
    report.scale = report.grid_acceptance[pick].first;
    report.acceptance = report.grid_acceptance[pick].second;
    report.thresholds = thresholds_at(report.scale);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pilot.summaries.size(); ++i) {
        const auto& s = pilot.summaries[i];
        if (!s) continue;
        double worst = 0.0;
        for (std::size_t p = 0; p < P; ++p) {
            worst = std::max(worst, std::abs(s->values[p] - observed.values[p]) / report.sd[p]);
        }
        if (worst < best) {
            best = worst;
            report.best_theta = pilot.thetas[i];
        }
    }
    return report;
}

PilotReport pilot_calibrate(const EventSequence& observed, const Distortion& d, const UniformPrior& prior,
                            const SummaryCalculator& summaries, std::size_t n_pilot,
                            std::pair<double, double> band, RandomStream& rng, const PilotOptions& options) {
    if (n_pilot < 1000) throw ConfigError("pilot size must be at least 1000");
    SummaryVector s_obs;
    try {
        s_obs = summaries(observed);
    } catch (const DegenerateInputError& e) {
        throw CalibrationError(std::string("observed data cannot be summarised: ") + e.what());
    }
    const PilotSample pilot = run_pilot(observed.horizon(), d, prior, summaries, n_pilot, rng, options);
    return calibrate_from_pilot(pilot, s_obs, band, options.scale_grid);
}

Chain abc_mcmc(const EventSequence& observed, const Distortion& d, const UniformPrior& prior,
               const ProposalKernel& kernel, const SummaryCalculator& summaries, const Thresholds& eps,
               std::size_t iterations, RandomStream& rng, const SamplerOptions& options) {
    prior.validate();
    kernel.validate();
    eps.validate();
    validate(d, observed.horizon());
    check_fixed(options.fixed, prior);
    if (iterations == 0) throw ConfigError("chain length must be at least 1");
    if (eps.eps.size() != summaries.dimension()) {
        throw ConfigError("expected " + std::to_string(summaries.dimension()) + " thresholds for family " +
                          std::string(to_string(summaries.family())) + ", got " + std::to_string(eps.eps.size()));
    }
    // Computed once; every candidate is compared against this vector.
    const SummaryVector s_obs = summaries(observed);
    const double T = observed.horizon();

    Chain chain;
    chain.prior = prior;
    chain.kernel = kernel;
    chain.thresholds = eps;
    chain.seed = rng.seed();
    chain.samples.reserve(iterations);

    HawkesParams current = initial_state(prior, options, rng);
    double current_logprior = prior_logdensity(current, prior);
    for (std::size_t j = 1; j <= iterations; ++j) {
        const HawkesParams candidate = options.fixed.apply(propose(current, kernel, rng));
        bool accepted = false;
        const double candidate_logprior = prior_logdensity(candidate, prior);
        if (candidate_logprior != kNegInf) {
            const EventSequence simulated = distort(simulate(candidate, T, rng), d, rng);
            const auto s_sim = summaries.try_compute(simulated);
            if (s_sim && accept_candidate(s_obs, *s_sim, eps)) {
                // Symmetric kernel: the q-ratio cancels, leaving the prior ratio.
                const double log_ratio = candidate_logprior - current_logprior;
                accepted = log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio;
            }
        }
        if (accepted) {
            current = candidate;
            current_logprior = candidate_logprior;
        }
        chain.samples.push_back({j, current, accepted});
    }
    return chain;
}

Chain exact_mh(const EventSequence& events, const UniformPrior& prior, const ProposalKernel& kernel,
               std::size_t iterations, RandomStream& rng, const ExactMhOptions& options) {
    prior.validate();
    kernel.validate();
    check_fixed(options.fixed, prior);
    if (iterations == 0) throw ConfigError("chain length must be at least 1");
    const LogLikelihoodFn loglik = options.log_likelihood ? options.log_likelihood : LogLikelihoodFn(log_likelihood);

    Chain chain;
    chain.prior = prior;
    chain.kernel = kernel;
    chain.seed = rng.seed();
    chain.samples.reserve(iterations);

    HawkesParams current = initial_state(prior, options, rng);
    double current_logpost = loglik(events, current) + prior_logdensity(current, prior);
    for (std::size_t j = 1; j <= iterations; ++j) {
        const HawkesParams candidate = options.fixed.apply(propose(current, kernel, rng));
        bool accepted = false;
        const double candidate_logprior = prior_logdensity(candidate, prior);
        if (candidate_logprior != kNegInf) {
            const double candidate_logpost = loglik(events, candidate) + candidate_logprior;
            const double log_ratio = candidate_logpost - current_logpost;
            if (log_ratio >= 0.0 || std::log(rng.uniform_open()) < log_ratio) {
                accepted = true;
                current = candidate;
                current_logpost = candidate_logpost;
            }
        }
        chain.samples.push_back({j, current, accepted});
    }
    return chain;
}

std::size_t default_burn_in(std::size_t chain_length) noexcept { return chain_length / 5; }

PosteriorSummary posterior_summary(const Chain& chain, std::size_t burn_in, std::size_t thin) {
    if (thin == 0) throw ConfigError("thinning interval must be at least 1");
    if (burn_in >= chain.samples.size()) {
        throw ConfigError("burn-in (" + std::to_string(burn_in) + ") leaves no samples from a chain of length " +
                          std::to_string(chain.samples.size()));
    }
    std::vector<double> mu;
    std::vector<double> K;
    std::vector<double> beta;
    std::size_t accepted = 0;
    for (std::size_t i = burn_in; i < chain.samples.size(); i += thin) {
        const auto& s = chain.samples[i];
        mu.push_back(s.theta.mu);
        K.push_back(s.theta.K);
        beta.push_back(s.theta.beta);
        if (s.accepted) ++accepted;
    }
    PosteriorSummary out;
    out.mu = summarize(mu);
    out.K = summarize(K);
    out.beta = summarize(beta);
    out.retained = mu.size();
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(out.retained);
    return out;
}

}  // namespace hawkes_abc
