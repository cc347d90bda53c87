#include "hawkes_abc/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hawkes_abc/errors.hpp"

namespace hawkes_abc {

namespace {

void require_diffs(const EventSequence& events) {
    if (events.size() < 2) {
        throw DegenerateInputError("inter-event differences need at least 2 events, got " +
                                   std::to_string(events.size()));
    }
}

std::vector<double> diffs_of(std::span<const double> t) {
    std::vector<double> d(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) d[i - 1] = t[i] - t[i - 1];
    return d;
}

// Abc7 without throwing; nullopt for degenerate sequences.
std::optional<SummaryVector> abc7_summaries(const EventSequence& events, std::span<const double, 3> windows) {
    if (events.size() < kMinSummaryEvents) return std::nullopt;
    const std::vector<double> gaps = diffs_of(events.times());
    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());

    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    const double median = quantile_sorted(sorted, 0.5);
    const double q90 = quantile_sorted(sorted, 0.9);

    double upper_sum = 0.0;
    double lower_sum = 0.0;
    std::size_t upper_n = 0;
    std::size_t lower_n = 0;
    for (double g : gaps) {
        if (g > q90) {
            upper_sum += g;
            ++upper_n;
        }
        if (g < median) {
            lower_sum += g;
            ++lower_n;
        }
    }
    if (upper_n == 0 || lower_n == 0 || !(mean > 0.0)) return std::nullopt;

    SummaryVector s;
    s.family = SummaryFamily::Abc7;
    s.values = {
        std::log(static_cast<double>(events.size())),
        median / mean,
        ripley_k(events, windows[0]),
        ripley_k(events, windows[1]),
        ripley_k(events, windows[2]),
        upper_sum / static_cast<double>(upper_n),
        lower_sum / static_cast<double>(lower_n),
    };
    return s;
}

}  // namespace

std::string_view to_string(SummaryFamily family) noexcept {
    return family == SummaryFamily::Abc7 ? "abc7" : "alt2";
}

SummaryFamily parse_summary_family(std::string_view text) {
    if (text == "abc7") return SummaryFamily::Abc7;
    if (text == "alt2") return SummaryFamily::Alt2;
    throw ConfigError("unknown summary family '" + std::string(text) + "' (expected abc7|alt2)");
}

std::size_t family_dimension(SummaryFamily family) noexcept {
    return family == SummaryFamily::Abc7 ? 7 : 2;
}

void Thresholds::validate() const {
    if (eps.empty()) throw ConfigError("thresholds are empty");
    for (double e : eps) {
        if (!(e > 0.0)) throw ConfigError("every threshold must be > 0");
    }
}

std::vector<double> interevent_diffs(const EventSequence& events) {
    require_diffs(events);
    return diffs_of(events.times());
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw DegenerateInputError("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double ripley_k(const EventSequence& events, double window) {
    const auto t = events.times();
    if (t.empty()) throw DegenerateInputError("Ripley statistic needs at least one event");
    std::size_t pairs = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (j <= i) j = i + 1;
        while (j < t.size() && t[j] - t[i] <= window) ++j;
        pairs += j - i - 1;
    }
    return 2.0 * static_cast<double>(pairs) / static_cast<double>(t.size());
}

double histogram_kl(std::span<const double> reference_gaps, std::span<const double> gaps, std::size_t bins) {
    if (reference_gaps.empty() || gaps.empty()) throw DegenerateInputError("histogram of an empty sample");
    if (bins == 0) throw DomainError("histogram needs at least one bin");
    const double top = std::max(*std::max_element(reference_gaps.begin(), reference_gaps.end()),
                                *std::max_element(gaps.begin(), gaps.end()));
    if (!(top > 0.0)) throw DegenerateInputError("inter-event differences are all zero");
    const double width = top / static_cast<double>(bins);

    const auto histogram = [&](std::span<const double> values) {
        std::vector<double> counts(bins, 0.0);
        for (double v : values) {
            auto k = static_cast<std::size_t>(v / width);
            counts[std::min(k, bins - 1)] += 1.0;
        }
        const double total = static_cast<double>(values.size()) + static_cast<double>(bins);
        for (double& c : counts) c = (c + 1.0) / total;
        return counts;
    };
    const std::vector<double> p = histogram(reference_gaps);
    const std::vector<double> q = histogram(gaps);
    double kl = 0.0;
    for (std::size_t k = 0; k < bins; ++k) kl += p[k] * std::log(p[k] / q[k]);
    return std::max(kl, 0.0);
}

SummaryVector compute_summaries(const EventSequence& events, std::span<const double, 3> windows) {
    if (events.size() < kMinSummaryEvents) {
        throw DegenerateInputError("summaries need at least " + std::to_string(kMinSummaryEvents) +
                                   " events, got " + std::to_string(events.size()));
    }
    auto s = abc7_summaries(events, windows);
    if (!s) throw DegenerateInputError("inter-event tail selection is empty (all differences equal?)");
    return *s;
}

SummaryVector compute_summaries_alt(const EventSequence& events, const EventSequence& reference) {
    require_diffs(events);
    require_diffs(reference);
    const std::vector<double> ref = diffs_of(reference.times());
    const std::vector<double> own = diffs_of(events.times());
    return SummaryVector{SummaryFamily::Alt2,
                         {std::log(static_cast<double>(events.size())), histogram_kl(ref, own)}};
}

bool accept_candidate(const SummaryVector& observed, const SummaryVector& simulated, const Thresholds& eps) {
    if (observed.family != simulated.family || observed.values.size() != simulated.values.size() ||
        observed.values.size() != eps.eps.size()) {
        throw DomainError("summary vectors and thresholds belong to different families");
    }
    for (std::size_t p = 0; p < eps.eps.size(); ++p) {
        if (!(std::abs(simulated.values[p] - observed.values[p]) < eps.eps[p])) return false;
    }
    return true;
}

SummaryCalculator::SummaryCalculator(SummaryFamily family, std::array<double, 3> windows,
                                     std::vector<double> reference_gaps)
    : family_(family), windows_(windows), reference_gaps_(std::move(reference_gaps)) {}

SummaryCalculator SummaryCalculator::abc7(std::array<double, 3> windows) {
    for (double w : windows) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("Ripley windows must be positive");
    }
    return SummaryCalculator(SummaryFamily::Abc7, windows, {});
}

SummaryCalculator SummaryCalculator::alt2(const EventSequence& reference) {
    return SummaryCalculator(SummaryFamily::Alt2, kDefaultRipleyWindows, interevent_diffs(reference));
}

SummaryVector SummaryCalculator::operator()(const EventSequence& events) const {
    if (family_ == SummaryFamily::Abc7) return compute_summaries(events, windows_);
    require_diffs(events);
    const std::vector<double> own = diffs_of(events.times());
    return SummaryVector{SummaryFamily::Alt2,
                         {std::log(static_cast<double>(events.size())), histogram_kl(reference_gaps_, own)}};
}

std::optional<SummaryVector> SummaryCalculator::try_compute(const EventSequence& events) const {
    if (family_ == SummaryFamily::Abc7) return abc7_summaries(events, windows_);
    if (events.size() < kMinSummaryEvents) return std::nullopt;
    const std::vector<double> own = diffs_of(events.times());
    return SummaryVector{SummaryFamily::Alt2,
                         {std::log(static_cast<double>(events.size())), histogram_kl(reference_gaps_, own)}};
}

}  // namespace hawkes_abc
