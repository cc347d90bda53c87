#include "hawkes_abc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "hawkes_abc/errors.hpp"
#include "hawkes_abc/io.hpp"

namespace hawkes_abc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double number(std::string_view key, std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) {
        throw ConfigError("'" + std::string(key) + "': cannot parse '" + std::string(s) + "' as a number");
    }
    return v;
}

std::vector<double> numbers(std::string_view key, std::string_view s, std::optional<std::size_t> count = {}) {
    std::vector<double> out;
    for (auto tok : tokens(s)) out.push_back(number(key, tok));
    if (count && out.size() != *count) {
        throw ConfigError("'" + std::string(key) + "' expects " + std::to_string(*count) + " value(s)");
    }
    return out;
}

template <class Int>
Int integer(std::string_view key, std::string_view s) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError("'" + std::string(key) + "': cannot parse '" + std::string(s) + "' as an integer");
    }
    return v;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += format_full(xs[i]);
    }
    return out;
}

}  // namespace

std::size_t ExperimentConfig::effective_burn_in() const noexcept {
    return burn_in.value_or(default_burn_in(iterations));
}

void ExperimentConfig::validate() const {
    prior.validate();
    kernel.validate();
    if (horizon && !(*horizon >= 0.0 && std::isfinite(*horizon))) throw ConfigError("horizon must be >= 0");
    if (eps) {
        if (eps->size() != family_dimension(family)) {
            throw ConfigError("family " + std::string(to_string(family)) + " needs " +
                              std::to_string(family_dimension(family)) + " thresholds, got " +
                              std::to_string(eps->size()));
        }
        Thresholds{*eps}.validate();
    }
    if (eps_scale && !(*eps_scale > 0.0)) throw ConfigError("eps_scale must be > 0");
    const bool needs_pilot = !eps && !(eps_scale && std::isinf(*eps_scale));
    if (needs_pilot && pilot_size < 1000) throw ConfigError("pilot.size must be at least 1000");
    if (!(band.first >= 0.0 && band.first <= band.second && band.second <= 1.0)) {
        throw ConfigError("pilot.band must satisfy 0 <= low <= high <= 1");
    }
    if (scale_grid.empty()) throw ConfigError("pilot.grid is empty");
    for (double c : scale_grid) {
        if (!(c > 0.0)) throw ConfigError("pilot.grid entries must be > 0");
    }
    if (iterations == 0) throw ConfigError("iterations must be at least 1");
    if (effective_burn_in() >= iterations) throw ConfigError("burn_in must be smaller than iterations");
    if (thin == 0) throw ConfigError("thin must be at least 1");
    if (chains == 0) throw ConfigError("chains must be at least 1");
    if (init && !prior.contains(fixed.apply(*init))) throw ConfigError("init lies outside the prior support");
    const auto within = [](const std::optional<double>& v, const Interval& iv) {
        return !v || (*v >= iv.lo && *v <= iv.hi);
    };
    if (!within(fixed.mu, prior.mu) || !within(fixed.K, prior.K) || !within(fixed.beta, prior.beta)) {
        throw ConfigError("fixed parameter values must lie inside the prior bounds");
    }
    if (truncate && !(*truncate > 0.0)) throw ConfigError("truncate must be > 0");
}

void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key.starts_with("result.") || key.starts_with("calibration.") || key.starts_with("run.")) return;

    const auto interval = [&] {
        const auto v = numbers(key, value, 2);
        return Interval{v[0], v[1]};
    };
    if (key == "horizon") {
        cfg.horizon = number(key, value);
    } else if (key == "prior.mu") {
        cfg.prior.mu = interval();
    } else if (key == "prior.K") {
        cfg.prior.K = interval();
    } else if (key == "prior.beta") {
        cfg.prior.beta = interval();
    } else if (key == "proposal.sd") {
        const auto v = numbers(key, value, 3);
        cfg.kernel = {v[0], v[1], v[2]};
    } else if (key == "distortion") {
        cfg.distortion = parse_distortion(value);
    } else if (key == "summaries") {
        cfg.family = parse_summary_family(value);
    } else if (key == "ripley.windows") {
        const auto v = numbers(key, value, 3);
        cfg.ripley_windows = {v[0], v[1], v[2]};
    } else if (key == "eps") {
        cfg.eps = numbers(key, value);
    } else if (key == "eps_scale") {
        cfg.eps_scale = number(key, value);
    } else if (key == "pilot.size") {
        cfg.pilot_size = integer<std::size_t>(key, value);
    } else if (key == "pilot.band") {
        const auto v = numbers(key, value, 2);
        cfg.band = {v[0], v[1]};
    } else if (key == "pilot.grid") {
        cfg.scale_grid = numbers(key, value);
    } else if (key == "iterations") {
        cfg.iterations = integer<std::size_t>(key, value);
    } else if (key == "burn_in") {
        cfg.burn_in = integer<std::size_t>(key, value);
    } else if (key == "thin") {
        cfg.thin = integer<std::size_t>(key, value);
    } else if (key == "seed") {
        cfg.seed = integer<std::uint64_t>(key, value);
    } else if (key == "chains") {
        cfg.chains = integer<unsigned>(key, value);
    } else if (key == "init") {
        const auto v = numbers(key, value, 3);
        cfg.init = HawkesParams{v[0], v[1], v[2]};
    } else if (key == "fix.mu") {
        cfg.fixed.mu = number(key, value);
    } else if (key == "fix.K") {
        cfg.fixed.K = number(key, value);
    } else if (key == "fix.beta") {
        cfg.fixed.beta = number(key, value);
    } else if (key == "truncate") {
        cfg.truncate = number(key, value);
    } else if (key == "input") {
        cfg.input = value;
    } else if (key == "output") {
        cfg.output = value;
    } else if (key == "report") {
        cfg.report = value;
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, lineno, "expected key=value");
        try {
            apply_config_entry(base, text.substr(0, eq), text.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
    return parse_config(in, path.string(), std::move(base));
}

std::string to_config_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    const auto put = [&os](std::string_view key, const std::string& value) { os << key << '=' << value << '\n'; };
    if (cfg.horizon) put("horizon", format_full(*cfg.horizon));
    put("prior.mu", join({cfg.prior.mu.lo, cfg.prior.mu.hi}));
    put("prior.K", join({cfg.prior.K.lo, cfg.prior.K.hi}));
    put("prior.beta", join({cfg.prior.beta.lo, cfg.prior.beta.hi}));
    put("proposal.sd", join({cfg.kernel.mu_sd, cfg.kernel.K_sd, cfg.kernel.beta_sd}));
    put("distortion", to_string(cfg.distortion));
    put("summaries", std::string(to_string(cfg.family)));
    put("ripley.windows", join({cfg.ripley_windows.begin(), cfg.ripley_windows.end()}));
    if (cfg.eps) put("eps", join(*cfg.eps));
    if (cfg.eps_scale) put("eps_scale", format_full(*cfg.eps_scale));
    put("pilot.size", std::to_string(cfg.pilot_size));
    put("pilot.band", join({cfg.band.first, cfg.band.second}));
    put("pilot.grid", join(cfg.scale_grid));
    put("iterations", std::to_string(cfg.iterations));
    if (cfg.burn_in) put("burn_in", std::to_string(*cfg.burn_in));
    put("thin", std::to_string(cfg.thin));
    put("seed", std::to_string(cfg.seed));
    put("chains", std::to_string(cfg.chains));
    if (cfg.init) put("init", join({cfg.init->mu, cfg.init->K, cfg.init->beta}));
    if (cfg.fixed.mu) put("fix.mu", format_full(*cfg.fixed.mu));
    if (cfg.fixed.K) put("fix.K", format_full(*cfg.fixed.K));
    if (cfg.fixed.beta) put("fix.beta", format_full(*cfg.fixed.beta));
    if (cfg.truncate) put("truncate", format_full(*cfg.truncate));
    if (!cfg.input.empty()) put("input", cfg.input);
    if (!cfg.output.empty()) put("output", cfg.output);
    if (!cfg.report.empty()) put("report", cfg.report);
    return os.str();
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnvVar)) {
        const std::string_view s = trim(env);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError(std::string(kSeedEnvVar) + " must be an unsigned integer");
        }
        return v;
    }
    return kDefaultSeed;
}

}  // namespace hawkes_abc
