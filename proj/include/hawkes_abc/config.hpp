#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hawkes_abc/distortion.hpp"
#include "hawkes_abc/inference.hpp"
#include "hawkes_abc/summaries.hpp"

namespace hawkes_abc {

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr const char* kSeedEnvVar = "HAWKES_ABC_SEED";
inline constexpr std::size_t kDefaultIterations = 200000;

/// Everything needed to reproduce a calibrate/abc/mh-exact run.
///
/// Threshold selection, in order of precedence:
///   eps        explicit per-statistic thresholds;
///   eps_scale  eps_p = scale * pilot sd_p (infinite scale skips the pilot);
///   otherwise  grid calibration against the pilot acceptance band.
struct ExperimentConfig {
    std::optional<double> horizon;
    UniformPrior prior;
    ProposalKernel kernel;
    Distortion distortion{NoDistortion{}};
    SummaryFamily family{SummaryFamily::Abc7};
    std::array<double, 3> ripley_windows{kDefaultRipleyWindows};

    std::optional<std::vector<double>> eps;
    std::optional<double> eps_scale;
    std::size_t pilot_size{kDefaultPilotSize};
    std::pair<double, double> band{kDefaultAcceptanceBand};
    std::vector<double> scale_grid{kDefaultScaleGrid};

    std::size_t iterations{kDefaultIterations};
    /// Defaults to 20% of the chain when absent.
    std::optional<std::size_t> burn_in;
    std::size_t thin{1};
    std::uint64_t seed{kDefaultSeed};
    unsigned chains{1};
    std::optional<HawkesParams> init;
    FixedParameters fixed;
    /// mh-exact only: restrict the data to [0, truncate].
    std::optional<double> truncate;

    std::string input;
    std::string output;
    std::string report;

    std::size_t effective_burn_in() const noexcept;
    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

/// Applies one key=value entry. Keys in the report-only namespaces
/// (result., calibration., run.) are ignored so a RunReport can be fed back.
void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value lines; '#' comments and blank lines ignored.
ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Full-precision key=value echo; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ExperimentConfig& cfg);

/// Seed default, honouring the HAWKES_ABC_SEED environment override.
std::uint64_t default_seed();

}  // namespace hawkes_abc
