#include "hawkes_abc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hawkes_abc/config.hpp"
#include "hawkes_abc/errors.hpp"
#include "hawkes_abc/experiments.hpp"
#include "hawkes_abc/io.hpp"

namespace hawkes_abc {

namespace {

namespace fs = std::filesystem;

// A CLI flag that maps onto one config key; values are joined and parsed by
// apply_config_entry so flags and config files share one grammar.
struct KeyedFlag {
    const char* flag;
    const char* key;
    int nargs;
    const char* help;
};

constexpr KeyedFlag kExperimentFlags[] = {
    {"--horizon", "horizon", 1, "Observation window end T (overrides the event file directive)"},
    {"--prior-mu", "prior.mu", 2, "Uniform prior bounds for mu"},
    {"--prior-k", "prior.K", 2, "Uniform prior bounds for K"},
    {"--prior-beta", "prior.beta", 2, "Uniform prior bounds for beta"},
    {"--proposal-sd", "proposal.sd", 3, "Random-walk standard deviations for (mu, K, beta)"},
    {"--summaries", "summaries", 1, "Summary family: abc7 | alt2"},
    {"--ripley-windows", "ripley.windows", 3, "Ripley window lengths"},
    {"--eps", "eps", -1, "Explicit per-statistic thresholds"},
    {"--eps-scale", "eps_scale", 1, "Thresholds = scale * pilot sd ('inf' disables the threshold test)"},
    {"--pilot-size", "pilot.size", 1, "Number of prior-predictive pilot draws"},
    {"--band", "pilot.band", 2, "Target pilot acceptance band (low high)"},
    {"--grid", "pilot.grid", -1, "Decreasing grid of threshold scales"},
    {"--iterations,-J", "iterations", 1, "Chain length"},
    {"--burn-in", "burn_in", 1, "Samples discarded from the start of each chain (default 20%)"},
    {"--thin", "thin", 1, "Keep every n-th sample after burn-in"},
    {"--seed", "seed", 1, "Random seed"},
    {"--chains", "chains", 1, "Independent chains, run concurrently"},
    {"--init", "init", 3, "Starting (mu, K, beta)"},
    {"--fix-mu", "fix.mu", 1, "Hold mu fixed at this value"},
    {"--fix-k", "fix.K", 1, "Hold K fixed at this value"},
    {"--fix-beta", "fix.beta", 1, "Hold beta fixed at this value"},
    {"--input,-i", "input", 1, "Observed event file"},
    {"--output,-o", "output", 1, "Chain CSV path"},
    {"--report", "report", 1, "Run report path"},
};

struct DistortionFlags {
    std::string spec;
    std::vector<double> gap;
    std::vector<double> linear;
    double noise{0.0};
    double delay{0.0};
    std::vector<std::size_t> gap_events;

    void add_to(CLI::App* app, bool allow_event_gap) {
        app->add_option("--distortion", spec, "Distortion spec: none | gap S E | linear A B | noise SIGMA | delay C");
        app->add_option("--gap", gap, "Delete events with S <= t <= E")->expected(2);
        app->add_option("--linear", linear, "Keep events with probability 1 - (A + B t / T)")->expected(2);
        app->add_option("--noise", noise, "Gaussian timestamp noise with this standard deviation");
        app->add_option("--delay", delay, "Shift every timestamp by this amount");
        if (allow_event_gap) {
            app->add_option("--gap-events", gap_events,
                            "Gap spanning the I-th through J-th input events (1-based)")
                ->expected(2);
        }
    }

    // Returns the spec text when one distortion flag was given.
    std::optional<std::string> resolve(const CLI::App* app, const EventSequence* events = nullptr) const {
        std::vector<std::string> specs;
        std::ostringstream os;
        os.precision(17);
        if (app->count("--distortion")) specs.push_back(spec);
        if (app->count("--gap")) {
            os.str("");
            os << "gap " << gap[0] << ' ' << gap[1];
            specs.push_back(os.str());
        }
        if (app->count("--linear")) {
            os.str("");
            os << "linear " << linear[0] << ' ' << linear[1];
            specs.push_back(os.str());
        }
        if (app->count("--noise")) {
            os.str("");
            os << "noise " << noise;
            specs.push_back(os.str());
        }
        if (app->count("--delay")) {
            os.str("");
            os << "delay " << delay;
            specs.push_back(os.str());
        }
        if (events != nullptr && app->get_option_no_throw("--gap-events") != nullptr && app->count("--gap-events")) {
            specs.push_back(to_string(Distortion{gap_between_events(*events, gap_events[0], gap_events[1])}));
        }
        if (specs.size() > 1) throw ConfigError("give at most one distortion");
        if (specs.empty()) return std::nullopt;
        return specs.front();
    }
};

struct ExperimentFlags {
    std::string config_path;
    std::vector<std::vector<std::string>> values = std::vector<std::vector<std::string>>(std::size(kExperimentFlags));
    std::string truncate;
    DistortionFlags distortion;

    void add_to(CLI::App* app, bool with_truncate) {
        app->add_option("--config", config_path, "Config file (key=value lines; a run report also works)");
        for (std::size_t i = 0; i < std::size(kExperimentFlags); ++i) {
            const auto& f = kExperimentFlags[i];
            auto* opt = app->add_option(f.flag, values[i], f.help);
            if (f.nargs > 0) {
                opt->expected(f.nargs);
            } else {
                opt->expected(1, CLI::detail::expected_max_vector_size);
            }
        }
        if (with_truncate) app->add_option("--truncate", truncate, "Fit only events in [0, T_a]");
        distortion.add_to(app, false);
    }

    ExperimentConfig build(const CLI::App* app) const {
        ExperimentConfig cfg;
        cfg.seed = default_seed();
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        for (std::size_t i = 0; i < std::size(kExperimentFlags); ++i) {
            const auto& f = kExperimentFlags[i];
            std::string name = f.flag;
            name = name.substr(0, name.find(','));
            if (app->count(name) == 0) continue;
            std::string joined;
            for (const auto& v : values[i]) joined += (joined.empty() ? "" : " ") + v;
            apply_config_entry(cfg, f.key, joined);
        }
        if (app->get_option_no_throw("--truncate") != nullptr && app->count("--truncate")) {
            apply_config_entry(cfg, "truncate", truncate);
        }
        if (auto spec = distortion.resolve(app)) cfg.distortion = parse_distortion(*spec);
        cfg.validate();
        return cfg;
    }
};

EventSequence load_observed(const ExperimentConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("no input event file (use --input or input=)");
    return read_events(cfg.input, cfg.horizon);
}

fs::path chain_path(const std::string& output, unsigned k, unsigned n) {
    if (n == 1) return output;
    fs::path p(output);
    return p.parent_path() / (p.stem().string() + "." + std::to_string(k) + p.extension().string());
}

std::string join_full(const std::vector<double>& xs) {
    std::string out;
    for (double x : xs) out += (out.empty() ? "" : " ") + format_full(x);
    return out;
}

void write_pilot_report(std::ostream& os, const PilotReport& r) {
    os << "calibration.n_pilot=" << r.n_pilot << '\n';
    os << "calibration.n_degenerate=" << r.n_degenerate << '\n';
    os << "calibration.sd=" << join_full(r.sd) << '\n';
    os << "calibration.band=" << format_full(r.band.first) << ' ' << format_full(r.band.second) << '\n';
    os << "calibration.scale=" << format_full(r.scale) << '\n';
    os << "calibration.acceptance=" << format_full(r.acceptance) << '\n';
    os << "calibration.in_band=" << (r.in_band ? "true" : "false") << '\n';
    os << "calibration.grid=";
    for (std::size_t i = 0; i < r.grid_acceptance.size(); ++i) {
        os << (i ? " " : "") << format_full(r.grid_acceptance[i].first) << ':'
           << format_full(r.grid_acceptance[i].second);
    }
    os << '\n';
    if (r.best_theta) {
        os << "calibration.best_theta=" << format_full(r.best_theta->mu) << ' ' << format_full(r.best_theta->K) << ' '
           << format_full(r.best_theta->beta) << '\n';
    }
    os << "calibration.thresholds=" << join_full(r.thresholds.eps) << '\n';
}

struct RunReport {
    std::string command;
    ExperimentConfig config;
    PosteriorSummary summary;
    std::size_t observed_events{0};
    double horizon{0.0};
    std::optional<Thresholds> thresholds;
    std::optional<PilotReport> pilot;
    double seconds{0.0};
};

std::string report_text(const RunReport& r) {
    std::ostringstream os;
    os << "# hawkes-abc run report\n";
    os << "run.command=" << r.command << '\n';
    os << "run.observed_events=" << r.observed_events << '\n';
    os << "run.horizon=" << format_full(r.horizon) << '\n';
    os << "run.duration_seconds=" << format_human(r.seconds) << '\n';
    os << "run.burn_in=" << r.config.effective_burn_in() << '\n';
    os << "run.thin=" << r.config.thin << '\n';
    const auto param = [&](const char* name, const ParameterSummary& p) {
        os << "result." << name << ".mean=" << format_full(p.mean) << '\n';
        os << "result." << name << ".sd=" << format_full(p.sd) << '\n';
    };
    param("mu", r.summary.mu);
    param("K", r.summary.K);
    param("beta", r.summary.beta);
    os << "result.acceptance_rate=" << format_full(r.summary.acceptance_rate) << '\n';
    os << "result.retained=" << r.summary.retained << '\n';
    if (r.thresholds) os << "result.thresholds=" << join_full(r.thresholds->eps) << '\n';
    if (r.pilot) write_pilot_report(os, *r.pilot);
    os << "# configuration echo: feed this file back with --config to reproduce the run\n";
    os << to_config_text(r.config);
    return os.str();
}

std::string table_cell(const ParameterSummary& p) {
    return format_human(p.mean) + " (" + format_human(p.sd) + ")";
}

void print_table_header(std::ostream& out) {
    out << std::left << std::setw(24) << "Model" << std::setw(24) << "mu" << std::setw(24) << "K" << std::setw(24)
        << "beta" << "acceptance\n";
}

void print_table_row(std::ostream& out, const std::string& label, const PosteriorSummary& s) {
    out << std::left << std::setw(24) << label << std::setw(24) << table_cell(s.mu) << std::setw(24)
        << table_cell(s.K) << std::setw(24) << table_cell(s.beta) << format_human(s.acceptance_rate) << '\n';
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void finish_run(std::ostream& out, RunReport report, const std::vector<Chain>& chains,
                std::chrono::steady_clock::time_point started) {
    const auto& cfg = report.config;
    for (unsigned k = 0; k < chains.size(); ++k) {
        write_chain(chains[k], chain_path(cfg.output, k, static_cast<unsigned>(chains.size())));
    }
    report.summary = pooled_summary(chains, cfg.effective_burn_in(), cfg.thin);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    print_table_header(out);
    print_table_row(out, report.command, report.summary);
    const std::string text = report_text(report);
    if (!cfg.report.empty()) write_text_file(cfg.report, text);
}

// ---------------------------------------------------------------------------

int cmd_simulate(std::ostream& out, double mu, double K, double beta, std::optional<double> horizon,
                 std::optional<std::size_t> max_events, std::uint64_t seed, const std::string& output) {
    const HawkesParams theta{mu, K, beta};
    theta.validate();
    RandomStream rng(seed);
    EventSequence events(0.0);
    if (max_events && !horizon) {
        events = simulate_first_events(theta, *max_events, rng);
    } else if (max_events) {
        if (*max_events == 0) throw ConfigError("--max-events must be at least 1");
        const EventSequence full = simulate(theta, *horizon, rng);
        if (full.size() < *max_events) {
            throw ConfigError("only " + std::to_string(full.size()) + " events within the horizon; fewer than " +
                              std::to_string(*max_events));
        }
        events = full.head(*max_events);
    } else {
        if (!horizon) throw ConfigError("simulate needs --horizon or --max-events");
        events = simulate(theta, *horizon, rng);
    }
    std::ostringstream note;
    note.precision(17);
    note << "simulated mu=" << mu << " K=" << K << " beta=" << beta << " seed=" << seed;
    const std::vector<std::string> comments{note.str()};
    write_events(events, output, comments);
    out << "wrote " << events.size() << " events on [0, " << format_human(events.horizon()) << "] to " << output
        << '\n';
    return 0;
}

void print_summaries(std::ostream& out, const std::string& source, const EventSequence& events,
                     const SummaryVector& s) {
    out << "# " << to_string(s.family) << " summaries of " << source << ": N=" << events.size()
        << " T=" << format_human(events.horizon()) << '\n';
    static const char* abc7_labels[] = {"S1 log_count",       "S2 median_over_mean_gap", "S3 ripley_w1",
                                        "S4 ripley_w2",       "S5 ripley_w3",            "S6 mean_gap_above_q90",
                                        "S7 mean_gap_below_median"};
    static const char* alt2_labels[] = {"A1 log_count", "A2 gap_histogram_kl"};
    const auto labels = s.family == SummaryFamily::Abc7 ? abc7_labels : alt2_labels;
    for (std::size_t p = 0; p < s.values.size(); ++p) {
        out << std::left << std::setw(28) << labels[p] << format_human(s.values[p]) << '\n';
    }
    out << "statistic,value\n";
    for (std::size_t p = 0; p < s.values.size(); ++p) {
        const std::string label = labels[p];
        out << label.substr(0, label.find(' ')) << ',' << format_full(s.values[p]) << '\n';
    }
}

int cmd_report(std::ostream& out, const std::vector<std::string>& paths, std::vector<std::string> labels,
               std::optional<std::size_t> burn_in, std::size_t thin, const std::string& density_out,
               std::size_t bins) {
    if (paths.empty()) throw ConfigError("report needs at least one chain CSV");
    if (!labels.empty() && labels.size() != paths.size()) throw ConfigError("give one --label per chain file");
    if (thin == 0) throw ConfigError("--thin must be at least 1");
    if (bins == 0) throw ConfigError("--bins must be at least 1");
    std::ofstream density;
    if (!density_out.empty()) {
        density.open(density_out, std::ios::trunc);
        if (!density) throw std::runtime_error("cannot open '" + density_out + "' for writing");
        density << "model,parameter,bin_center,density\n";
    }
    print_table_header(out);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const Chain chain = read_chain(paths[i]);
        const std::string label = labels.empty() ? fs::path(paths[i]).stem().string() : labels[i];
        const std::size_t skip = burn_in.value_or(default_burn_in(chain.samples.size()));
        print_table_row(out, label, posterior_summary(chain, skip, thin));
        if (!density_out.empty()) {
            std::vector<double> mu, K, beta;
            for (std::size_t j = skip; j < chain.samples.size(); j += thin) {
                mu.push_back(chain.samples[j].theta.mu);
                K.push_back(chain.samples[j].theta.K);
                beta.push_back(chain.samples[j].theta.beta);
            }
            const auto emit = [&](const char* name, const std::vector<double>& xs) {
                for (const auto& row : histogram_density(xs, bins)) {
                    density << label << ',' << name << ',' << format_full(row.center) << ','
                            << format_full(row.density) << '\n';
                }
            };
            emit("mu", mu);
            emit("K", K);
            emit("beta", beta);
        }
    }
    if (density.is_open() && !density.flush()) throw std::runtime_error("write to '" + density_out + "' failed");
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian inference for Hawkes processes observed through missing or noisy event records"};
    app.name("hawkes-abc");
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a Hawkes process by thinning");
    double sim_mu = 0, sim_k = 0, sim_beta = 0;
    double sim_horizon = 0;
    std::size_t sim_max = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    sim->add_option("--mu", sim_mu, "Background rate")->required();
    sim->add_option("--k", sim_k, "Branching ratio")->required();
    sim->add_option("--beta", sim_beta, "Kernel decay rate")->required();
    sim->add_option("--horizon", sim_horizon, "Observation window end T");
    sim->add_option("--max-events", sim_max, "Keep the first N events; the window ends at the N-th event");
    sim->add_option("--seed", sim_seed, "Random seed");
    sim->add_option("--output,-o", sim_out, "Event file to write")->required();

    // distort
    auto* dis = app.add_subcommand("distort", "Apply a distortion to an event file");
    std::string dis_in, dis_out;
    double dis_horizon = 0;
    std::uint64_t dis_seed = 0;
    DistortionFlags dis_flags;
    dis->add_option("--input,-i", dis_in, "Event file to read")->required();
    dis->add_option("--output,-o", dis_out, "Event file to write")->required();
    dis->add_option("--horizon", dis_horizon, "Observation window end T");
    dis->add_option("--seed", dis_seed, "Random seed");
    dis_flags.add_to(dis, true);

    // summarize
    auto* sum = app.add_subcommand("summarize", "Print summary statistics of an event file");
    std::string sum_in, sum_ref, sum_family = "abc7";
    double sum_horizon = 0;
    std::vector<double> sum_windows;
    sum->add_option("--input,-i", sum_in, "Event file to read")->required();
    sum->add_option("--horizon", sum_horizon, "Observation window end T");
    sum->add_option("--summaries", sum_family, "abc7 | alt2");
    sum->add_option("--reference", sum_ref, "Reference event file for alt2 (default: the input)");
    sum->add_option("--ripley-windows", sum_windows, "Ripley window lengths")->expected(3);

    // calibrate / abc / mh-exact
    auto* cal = app.add_subcommand("calibrate", "Pilot run: choose ABC thresholds from prior-predictive draws");
    ExperimentFlags cal_flags;
    cal_flags.add_to(cal, false);
    auto* abc = app.add_subcommand("abc", "Run ABC-MCMC on observed (possibly distorted) events");
    ExperimentFlags abc_flags;
    abc_flags.add_to(abc, false);
    auto* mh = app.add_subcommand("mh-exact", "Exact-likelihood Metropolis-Hastings (ignores any distortion)");
    ExperimentFlags mh_flags;
    mh_flags.add_to(mh, true);

    // report
    auto* rep = app.add_subcommand("report", "Posterior table and density rows from chain CSVs");
    std::vector<std::string> rep_paths, rep_labels;
    std::size_t rep_burn = 0, rep_thin = 1, rep_bins = 40;
    std::string rep_density;
    rep->add_option("chains", rep_paths, "Chain CSV files")->required();
    rep->add_option("--label", rep_labels, "Row label per chain file");
    rep->add_option("--burn-in", rep_burn, "Samples discarded per chain (default 20%)");
    rep->add_option("--thin", rep_thin, "Keep every n-th sample");
    rep->add_option("--density-out", rep_density, "Write histogram density rows to this CSV");
    rep->add_option("--bins", rep_bins, "Histogram bins per parameter");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(out, sim_mu, sim_k, sim_beta,
                                sim->count("--horizon") ? std::optional<double>(sim_horizon) : std::nullopt,
                                sim->count("--max-events") ? std::optional<std::size_t>(sim_max) : std::nullopt,
                                sim->count("--seed") ? sim_seed : default_seed(), sim_out);
        }
        if (dis->parsed()) {
            const EventSequence events =
                read_events(dis_in, dis->count("--horizon") ? std::optional<double>(dis_horizon) : std::nullopt);
            const auto spec = dis_flags.resolve(dis, &events);
            if (!spec) throw ConfigError("distort needs one distortion flag");
            const Distortion d = parse_distortion(*spec);
            RandomStream rng(dis->count("--seed") ? dis_seed : default_seed());
            const EventSequence observed = distort(events, d, rng);
            const std::vector<std::string> comments{"distortion=" + to_string(d)};
            write_events(observed, dis_out, comments);
            out << "distortion=" << to_string(d) << '\n';
            return 0;
        }
        if (sum->parsed()) {
            const auto horizon = sum->count("--horizon") ? std::optional<double>(sum_horizon) : std::nullopt;
            const EventSequence events = read_events(sum_in, horizon);
            const SummaryFamily family = parse_summary_family(sum_family);
            SummaryVector s;
            if (family == SummaryFamily::Abc7) {
                std::array<double, 3> w = kDefaultRipleyWindows;
                if (!sum_windows.empty()) std::copy(sum_windows.begin(), sum_windows.end(), w.begin());
                s = SummaryCalculator::abc7(w)(events);
            } else {
                const EventSequence reference = sum_ref.empty() ? events : read_events(sum_ref);
                s = compute_summaries_alt(events, reference);
            }
            print_summaries(out, sum_in, events, s);
            return 0;
        }
        if (cal->parsed()) {
            const ExperimentConfig cfg = cal_flags.build(cal);
            const EventSequence observed = load_observed(cfg);
            const SummaryCalculator summaries = make_summary_calculator(cfg, observed);
            RandomStream rng(cfg.seed);
            PilotOptions options;
            options.fixed = cfg.fixed;
            options.scale_grid = cfg.eps_scale ? std::vector<double>{*cfg.eps_scale} : cfg.scale_grid;
            const PilotReport report = pilot_calibrate(observed, cfg.distortion, cfg.prior, summaries, cfg.pilot_size,
                                                       cfg.band, rng, options);
            std::ostringstream text;
            write_pilot_report(text, report);
            out << text.str();
            if (!cfg.report.empty()) write_text_file(cfg.report, text.str() + to_config_text(cfg));
            return 0;
        }
        if (abc->parsed()) {
            const auto started = std::chrono::steady_clock::now();
            const ExperimentConfig cfg = abc_flags.build(abc);
            if (cfg.output.empty()) throw ConfigError("abc needs --output for the chain CSV");
            const EventSequence observed = load_observed(cfg);
            AbcRun run = run_abc(observed, cfg);
            RunReport report;
            report.command = "abc";
            report.config = cfg;
            report.observed_events = observed.size();
            report.horizon = observed.horizon();
            report.thresholds = run.plan.eps;
            report.pilot = run.plan.pilot;
            finish_run(out, std::move(report), run.chains, started);
            return 0;
        }
        if (mh->parsed()) {
            const auto started = std::chrono::steady_clock::now();
            const ExperimentConfig cfg = mh_flags.build(mh);
            if (cfg.output.empty()) throw ConfigError("mh-exact needs --output for the chain CSV");
            const EventSequence observed = load_observed(cfg);
            RunReport report;
            report.command = "mh-exact";
            report.config = cfg;
            const EventSequence used = cfg.truncate ? observed.truncated(*cfg.truncate) : observed;
            report.observed_events = used.size();
            report.horizon = used.horizon();
            finish_run(out, std::move(report), run_exact(observed, cfg), started);
            return 0;
        }
        if (rep->parsed()) {
            return cmd_report(out, rep_paths, rep_labels,
                              rep->count("--burn-in") ? std::optional<std::size_t>(rep_burn) : std::nullopt, rep_thin,
                              rep_density, rep_bins);
        }
    } catch (const ConfigError& e) {
        err << "hawkes-abc: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "hawkes-abc: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "hawkes-abc: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace hawkes_abc
