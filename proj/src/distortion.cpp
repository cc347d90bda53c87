#include "hawkes_abc/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "hawkes_abc/errors.hpp"

namespace hawkes_abc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double linear_detection(const LinearDetection& d, double t, double horizon) {
    const double frac = horizon > 0.0 ? t / horizon : 0.0;
    return 1.0 - (d.a + d.b * frac);
}

// Sorts, drops anything outside [0, horizon] and breaks exact ties by nudging
// the later event up one ulp.
EventSequence finalize_shifted(std::vector<double> times, double horizon) {
    std::erase_if(times, [horizon](double t) { return !(t >= 0.0 && t <= horizon); });
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!out.empty() && !(out.back() < t)) {
            t = std::nextafter(out.back(), std::numeric_limits<double>::infinity());
            if (t > horizon) continue;
        }
        out.push_back(t);
    }
    return EventSequence(std::move(out), horizon);
}

}  // namespace

bool is_missingness(const Distortion& d) noexcept {
    return std::holds_alternative<NoDistortion>(d) || std::holds_alternative<Gap>(d) ||
           std::holds_alternative<LinearDetection>(d);
}

void validate(const Distortion& d, double horizon) {
    std::visit(overloaded{
                   [](const NoDistortion&) {},
                   [horizon](const Gap& g) {
                       if (!(g.start >= 0.0 && g.start < g.end && g.end <= horizon)) {
                           throw ConfigError("gap must satisfy 0 <= start < end <= T");
                       }
                   },
                   [horizon](const LinearDetection& l) {
                       if (!std::isfinite(l.a) || !std::isfinite(l.b)) {
                           throw ConfigError("linear detection coefficients must be finite");
                       }
                       // h is linear in t, so checking the endpoints covers the window.
                       for (double t : {0.0, horizon}) {
                           const double h = linear_detection(l, t, horizon);
                           if (!(h >= 0.0 && h <= 1.0)) {
                               throw ConfigError("linear detection probability " + std::to_string(h) +
                                                 " at t=" + std::to_string(t) + " is outside [0, 1]");
                           }
                       }
                   },
                   [](const GaussianNoise& n) {
                       if (!(n.sigma > 0.0) || !std::isfinite(n.sigma)) {
                           throw ConfigError("noise sigma must be positive and finite");
                       }
                   },
                   [](const FixedDelay& f) {
                       if (!std::isfinite(f.c)) throw ConfigError("delay must be finite");
                   },
               },
               d);
}

EventSequence distort(const EventSequence& events, const Distortion& d, RandomStream& rng) {
    const double T = events.horizon();
    validate(d, T);
    return std::visit(
        overloaded{
            [&](const NoDistortion&) { return events; },
            [&](const Gap& g) {
                std::vector<double> kept;
                kept.reserve(events.size());
                for (double t : events.times()) {
                    if (t < g.start || t > g.end) kept.push_back(t);
                }
                return EventSequence(std::move(kept), T);
            },
            [&](const LinearDetection& l) {
                std::vector<double> kept;
                kept.reserve(events.size());
                for (double t : events.times()) {
                    if (rng.bernoulli(linear_detection(l, t, T))) kept.push_back(t);
                }
                return EventSequence(std::move(kept), T);
            },
            [&](const GaussianNoise& n) {
                std::vector<double> shifted;
                shifted.reserve(events.size());
                for (double t : events.times()) shifted.push_back(t + rng.normal(0.0, n.sigma));
                return finalize_shifted(std::move(shifted), T);
            },
            [&](const FixedDelay& f) {
                std::vector<double> shifted;
                shifted.reserve(events.size());
                for (double t : events.times()) shifted.push_back(t + f.c);
                return finalize_shifted(std::move(shifted), T);
            },
        },
        d);
}

double detection_prob(double t, const Distortion& d, double horizon) {
    if (!(t >= 0.0 && t <= horizon)) {
        throw DomainError("detection probability requested outside [0, T]");
    }
    return std::visit(overloaded{
                          [](const NoDistortion&) { return 1.0; },
                          [t](const Gap& g) { return (t >= g.start && t <= g.end) ? 0.0 : 1.0; },
                          [t, horizon](const LinearDetection& l) { return linear_detection(l, t, horizon); },
                          [](const GaussianNoise&) -> double {
                              throw DomainError("detection probability is undefined for timestamp noise");
                          },
                          [](const FixedDelay&) -> double {
                              throw DomainError("detection probability is undefined for a fixed delay");
                          },
                      },
                      d);
}

std::string to_string(const Distortion& d) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const NoDistortion&) { os << "none"; },
                   [&](const Gap& g) { os << "gap " << g.start << ' ' << g.end; },
                   [&](const LinearDetection& l) { os << "linear " << l.a << ' ' << l.b; },
                   [&](const GaussianNoise& n) { os << "noise " << n.sigma; },
                   [&](const FixedDelay& f) { os << "delay " << f.c; },
               },
               d);
    return os.str();
}

Distortion parse_distortion(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string kind;
    is >> kind;
    std::vector<double> args;
    std::string token;
    while (is >> token) {
        try {
            std::size_t used = 0;
            args.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ConfigError("bad distortion argument '" + token + "' in '" + std::string(text) + "'");
        }
    }
    const auto expect = [&](std::size_t n) {
        if (args.size() != n) {
            throw ConfigError("distortion '" + kind + "' takes " + std::to_string(n) + " argument(s)");
        }
    };
    if (kind == "none") {
        expect(0);
        return NoDistortion{};
    }
    if (kind == "gap") {
        expect(2);
        return Gap{args[0], args[1]};
    }
    if (kind == "linear") {
        expect(2);
        return LinearDetection{args[0], args[1]};
    }
    if (kind == "noise") {
        expect(1);
        return GaussianNoise{args[0]};
    }
    if (kind == "delay") {
        expect(1);
        return FixedDelay{args[0]};
    }
    throw ConfigError("unknown distortion '" + kind + "' (expected none|gap|linear|noise|delay)");
}

}  // namespace hawkes_abc
