#include "hawkes_abc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hawkes_abc/errors.hpp"

namespace hawkes_abc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::string format_with(const char* fmt, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, value);
    return buf;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_full(double value) { return format_with("%.17g", value); }

std::string format_human(double value) { return format_with("%.6g", value); }

EventSequence parse_events(std::istream& in, const std::string& source, std::optional<double> horizon) {
    std::optional<double> directive;
    std::vector<std::pair<double, std::size_t>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const std::string_view body = trim(text.substr(1));
            if (body.starts_with("horizon")) {
                const auto eq = body.find('=');
                if (eq == std::string_view::npos || trim(body.substr(7, eq - 7)) != "") {
                    throw ParseError(source, lineno, "malformed horizon directive");
                }
                const auto v = to_double(body.substr(eq + 1));
                if (!v || !std::isfinite(*v) || *v < 0.0) {
                    throw ParseError(source, lineno, "horizon must be a non-negative number");
                }
                if (directive) throw ParseError(source, lineno, "duplicate horizon directive");
                directive = *v;
            }
            continue;
        }
        const auto v = to_double(text);
        if (!v || !std::isfinite(*v)) {
            throw ParseError(source, lineno, "cannot parse '" + std::string(text) + "' as a timestamp");
        }
        rows.emplace_back(*v, lineno);
    }
    const std::optional<double> T = horizon ? horizon : directive;
    if (!T) throw ParseError(source, lineno, "no horizon: add '# horizon=<T>' or pass one explicitly");

    std::vector<double> times;
    times.reserve(rows.size());
    for (const auto& [t, at] : rows) {
        if (t < 0.0 || t > *T) {
            throw ParseError(source, at, "timestamp " + format_full(t) + " outside [0, " + format_full(*T) + "]");
        }
        if (!times.empty() && !(times.back() < t)) {
            throw ParseError(source, at, "timestamps must be strictly increasing");
        }
        times.push_back(t);
    }
    return EventSequence(std::move(times), *T);
}

EventSequence read_events(const std::filesystem::path& path, std::optional<double> horizon) {
    auto in = open_input(path);
    return parse_events(in, path.string(), horizon);
}

void write_events(const EventSequence& events, std::ostream& out, std::span<const std::string> comments) {
    out << "# horizon=" << format_full(events.horizon()) << '\n';
    for (const auto& c : comments) out << "# " << c << '\n';
    for (double t : events.times()) out << format_full(t) << '\n';
}

void write_events(const EventSequence& events, const std::filesystem::path& path,
                  std::span<const std::string> comments) {
    auto out = open_output(path);
    write_events(events, out, comments);
    finish(out, path);
}

void write_chain(const Chain& chain, std::ostream& out) {
    out << kChainHeader << '\n';
    for (const auto& s : chain.samples) {
        out << s.iter << ',' << format_full(s.theta.mu) << ',' << format_full(s.theta.K) << ','
            << format_full(s.theta.beta) << ',' << (s.accepted ? 1 : 0) << '\n';
    }
}

void write_chain(const Chain& chain, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_chain(chain, out);
    finish(out, path);
}

Chain parse_chain(std::istream& in, const std::string& source) {
    Chain chain;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || trim(line) != kChainHeader) {
        throw ParseError(source, 1, std::string("expected header '") + kChainHeader + "'");
    }
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (;;) {
            const auto comma = text.find(',', start);
            fields.push_back(text.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 5) throw ParseError(source, lineno, "expected 5 comma-separated fields");
        ChainSample s;
        const auto iter_field = trim(fields[0]);
        const auto [ptr, ec] = std::from_chars(iter_field.data(), iter_field.data() + iter_field.size(), s.iter);
        if (ec != std::errc() || ptr != iter_field.data() + iter_field.size()) {
            throw ParseError(source, lineno, "bad iteration number");
        }
        const auto mu = to_double(fields[1]);
        const auto K = to_double(fields[2]);
        const auto beta = to_double(fields[3]);
        const auto acc = trim(fields[4]);
        if (!mu || !K || !beta) throw ParseError(source, lineno, "bad parameter value");
        if (acc != "0" && acc != "1") throw ParseError(source, lineno, "accepted flag must be 0 or 1");
        s.theta = {*mu, *K, *beta};
        s.accepted = acc == "1";
        chain.samples.push_back(s);
    }
    return chain;
}

Chain read_chain(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_chain(in, path.string());
}

std::vector<DensityRow> histogram_density(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw DegenerateInputError("histogram of an empty sample");
    if (bins == 0) throw DomainError("histogram needs at least one bin");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) return {{lo, 1.0}};
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    for (double v : values) {
        auto k = static_cast<std::size_t>((v - lo) / width);
        counts[std::min(k, bins - 1)] += 1.0;
    }
    std::vector<DensityRow> rows(bins);
    const double n = static_cast<double>(values.size());
    for (std::size_t k = 0; k < bins; ++k) {
        rows[k] = {lo + (static_cast<double>(k) + 0.5) * width, counts[k] / (n * width)};
    }
    return rows;
}

}  // namespace hawkes_abc
