#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hawkes_abc/hawkes.hpp"

namespace hawkes_abc {

enum class SummaryFamily {
    /// log N, median/mean gap ratio, three Ripley counts, upper and lower gap means.
    Abc7,
    /// log N and histogram KL divergence of inter-event times against a reference.
    Alt2,
};

std::string_view to_string(SummaryFamily family) noexcept;
SummaryFamily parse_summary_family(std::string_view text);
std::size_t family_dimension(SummaryFamily family) noexcept;

/// Fewer observed events than this cannot be summarised by Abc7.
inline constexpr std::size_t kMinSummaryEvents = 10;
inline constexpr std::array<double, 3> kDefaultRipleyWindows{1.0, 2.0, 4.0};
inline constexpr std::size_t kKlBins = 20;

struct SummaryVector {
    SummaryFamily family{SummaryFamily::Abc7};
    std::vector<double> values;
};

/// Per-statistic acceptance radii, aligned with SummaryVector::values.
struct Thresholds {
    std::vector<double> eps;

    /// Throws ConfigError unless every eps > 0 (infinity allowed).
    void validate() const;
};

/// t_{i} - t_{i-1}; DegenerateInputError for fewer than two events.
std::vector<double> interevent_diffs(const EventSequence& events);

/// Quantile with linear interpolation at position p*(n-1) on sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// (2/N) * #{i < j : t_j - t_i <= window}, no edge correction.
double ripley_k(const EventSequence& events, double window);

/// KL(reference || sample) between equal-width histograms on [0, max gap],
/// add-one smoothed so every bin has mass.
double histogram_kl(std::span<const double> reference_gaps, std::span<const double> gaps,
                    std::size_t bins = kKlBins);

/// Seven-statistic vector. DegenerateInputError when N < 10 or a tail selection is empty.
SummaryVector compute_summaries(const EventSequence& events,
                                std::span<const double, 3> windows = kDefaultRipleyWindows);

/// Two-statistic alternative: (log N, KL of inter-event histograms vs reference).
SummaryVector compute_summaries_alt(const EventSequence& events, const EventSequence& reference);

/// |sim_p - obs_p| < eps_p for every p. DomainError on family/length mismatch.
bool accept_candidate(const SummaryVector& observed, const SummaryVector& simulated,
                      const Thresholds& eps);

/// Bundles a summary family with its settings so the samplers can evaluate
/// candidates without knowing which family is active.
class SummaryCalculator {
public:
    static SummaryCalculator abc7(std::array<double, 3> windows = kDefaultRipleyWindows);
    static SummaryCalculator alt2(const EventSequence& reference);

    SummaryFamily family() const noexcept { return family_; }
    std::size_t dimension() const noexcept { return family_dimension(family_); }
    std::span<const double, 3> windows() const noexcept { return windows_; }

    /// Throws DegenerateInputError for sequences the family cannot summarise.
    SummaryVector operator()(const EventSequence& events) const;
    /// Non-throwing form for the sampler hot loops. Candidates with fewer than
    /// kMinSummaryEvents events give nullopt for either family.
    std::optional<SummaryVector> try_compute(const EventSequence& events) const;

private:
    SummaryCalculator(SummaryFamily family, std::array<double, 3> windows,
                      std::vector<double> reference_gaps);

    SummaryFamily family_;
    std::array<double, 3> windows_;
    std::vector<double> reference_gaps_;
};

}  // namespace hawkes_abc
