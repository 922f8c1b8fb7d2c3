// cli.hpp: command-line front end and the canned qutrit scenario.
#pragma once

#include "reclab/timing.hpp"

#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reclab {

// Exit codes: 0 success, 2 bad arguments or precondition, 3 horizon reached.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Qutrit with p = (1/2, 1/2 - delta, delta), delta = eps^2 and levels
// (0, 1, ratio): fast returns on the 1/ratio scale, then a long gap set by the
// slow level.
struct QutritReport {
    double epsilon = 0.0;
    double ratio = 0.0;
    double horizon = 0.0;
    double t_exit = 0.0;
    std::vector<double> recurrences;
    double max_gap = 0.0;        // largest gap between consecutive recurrences
    std::size_t gap_after = 0;   // index of the recurrence that opens it
    double gap_ratio = 0.0;      // max_gap / t_exit
    SearchStatus status = SearchStatus::HorizonExhausted;
};

inline constexpr double kQutritHorizon = 4.0 * std::numbers::pi;

QutritReport qutrit_scenario(double epsilon, double ratio, double horizon = kQutritHorizon);

struct QutritSweep {
    std::vector<QutritReport> runs;  // in the order of the ratios given
    bool monotone = false;           // gap_ratio strictly increasing
    bool pass = false;               // monotone and the last gap_ratio > 100
};

QutritSweep qutrit_sweep(double epsilon, std::span<const double> ratios,
                         double horizon = kQutritHorizon);

// Phase lists such as "0,pi", "pi/2,-0.5pi,1.25".
std::vector<double> parse_phase_list(std::string_view text);

// Flat "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text);

}  // namespace reclab
