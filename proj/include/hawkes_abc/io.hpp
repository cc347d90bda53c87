#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hawkes_abc/hawkes.hpp"
#include "hawkes_abc/inference.hpp"

namespace hawkes_abc {

/// 17 significant digits: round-trips any double.
std::string format_full(double value);
/// 6 significant digits for human-facing tables.
std::string format_human(double value);

/// Event file grammar:
///   '#' comment lines, optionally one '# horizon=<float>' directive,
///   one decimal timestamp per data line, blank lines ignored.
/// A horizon passed in explicitly wins over the directive.
EventSequence parse_events(std::istream& in, const std::string& source,
                           std::optional<double> horizon = std::nullopt);
EventSequence read_events(const std::filesystem::path& path, std::optional<double> horizon = std::nullopt);

/// Writes '# horizon=<T>', any extra comment lines, then one time per line.
void write_events(const EventSequence& events, std::ostream& out,
                  std::span<const std::string> comments = {});
void write_events(const EventSequence& events, const std::filesystem::path& path,
                  std::span<const std::string> comments = {});

inline constexpr const char* kChainHeader = "iter,mu,K,beta,accepted";

void write_chain(const Chain& chain, std::ostream& out);
void write_chain(const Chain& chain, const std::filesystem::path& path);

/// Reads a chain CSV back; only samples are restored.
Chain parse_chain(std::istream& in, const std::string& source);
Chain read_chain(const std::filesystem::path& path);

struct DensityRow {
    double center{0.0};
    double density{0.0};
};

/// Equal-width histogram normalised to integrate to one. A constant sample gives
/// a single bin of width one centred on the value.
std::vector<DensityRow> histogram_density(std::span<const double> values, std::size_t bins);

}  // namespace hawkes_abc
