// ensembles.hpp: Monte Carlo over random diagonal Hamiltonians with
// eigenvalues i.i.d. uniform on [-1, 1].
#pragma once

#include "reclab/bounds.hpp"
#include "reclab/spectral.hpp"
#include "reclab/timing.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reclab {

enum class StateFamily {
    Uniform,  // a_k = 1/sqrt(d)
    Eta,      // one randomly placed level with |a|^2 = eta, the rest equal
};

enum class RecurrencePolicy {
    Auto,   // horizon min(first recurrence bound, 1e8 / L)
    Fixed,  // horizon = EnsembleConfig::rec_horizon
    None,   // exit only
};

struct EnsembleConfig {
    std::size_t d = 2;
    double epsilon = 0.1;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    StateFamily family = StateFamily::Uniform;
    double eta = 0.0;
    std::optional<double> t_probe;
    RecurrencePolicy recurrence = RecurrencePolicy::Auto;
    double rec_horizon = 0.0;
    bool check_monotone = true;

    void validate() const;
};

// Parses "uniform" or "eta:<value>".
void parse_family(const std::string& text, EnsembleConfig& cfg);
std::string family_label(const EnsembleConfig& cfg);

// Concentration windows around E<H> = 0, E<H^2> = 1/3, E<H^4> = 1/5, with the
// fourth-moment window centred on 1/5.
struct WindowFlags {
    bool mean = false;           // |<H>| < 1/10
    bool second_moment = false;  // 1/5 < <H^2> < 1/2
    bool variance = false;       // 1/10 < Delta(H^2) < 1/2
    bool fourth_moment = false;  // |<H^4> - 1/5| < 1/10
    bool eps_star = false;       // eps* > 1/9

    bool all() const noexcept { return mean && second_moment && variance && fourth_moment && eps_star; }
};

WindowFlags moment_windows(const SpectralState& state, const MomentSummary& m);

struct TrialRecord {
    std::uint64_t trial_id = 0;
    std::uint64_t spectrum_seed = 0;
    MomentSummary moments;
    double fourth_raw = 0.0;  // <H^4>
    WindowFlags windows;
    SearchStatus exit_status = SearchStatus::HorizonExhausted;
    std::optional<double> t_exit;
    double mt_lower = 0.0;
    std::optional<double> qsl_upper;
    double miss_tol = 0.0;
    bool exit_window = false;  // sqrt(2) eps < t_exit < 2 sqrt(5) eps
    bool rec_attempted = false;
    std::optional<double> t_rec;
    double rec_horizon = 0.0;
    bool monotone_ok = false;  // D non-decreasing on [0, t_exit(eps*)]
    double d_eff = 0.0;
    std::size_t d_supp_quarter = 0;  // d_supp(eps^2 / 4)

    bool rec_censored() const noexcept { return rec_attempted && !t_rec; }
};

// The random state of trial `trial_id`; `key` receives the stream key.
SpectralState draw_trial_state(const EnsembleConfig& cfg, std::uint64_t trial_id,
                               std::uint64_t* key = nullptr);

TrialRecord sample_trial(const EnsembleConfig& cfg, std::uint64_t trial_id);

struct Quantiles {
    std::optional<double> q10, q50, q90;  // absent when the rank lands on a censored value
};

struct ProximityEstimate {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double ci_low = 0.0;   // 95% Wilson interval
    double ci_high = 0.0;
    LogScaled bound;       // (8 pi / eps^2) (C eps)^d, C = 50 (1 + 72 / sqrt 2)
    bool vacuous = false;  // bound >= 1
};

struct EnsembleSummary {
    EnsembleConfig config;
    std::vector<TrialRecord> records;  // ordered by trial id
    double window_fraction = 0.0;       // all moment windows
    double exit_window_fraction = 0.0;
    double joint_fraction = 0.0;        // windows and exit window together
    double monotone_fraction = 0.0;
    std::uint64_t sandwich_violations = 0;
    std::uint64_t exited = 0;
    Quantiles t_exit;
    Quantiles t_rec;
    std::uint64_t rec_found = 0;
    std::uint64_t rec_censored = 0;
    // Median of log t_rec with censored trials entered at log(horizon).
    std::optional<double> median_log_t_rec;
    std::optional<ProximityEstimate> proximity;
};

EnsembleSummary run_ensemble(const EnsembleConfig& cfg);

struct SweepSummary {
    std::vector<EnsembleSummary> runs;
    std::vector<double> median_log_t_rec;
    double slope = 0.0;  // least squares, d vs median log t_rec
    double ci_low = 0.0;  // 95% percentile bootstrap
    double ci_high = 0.0;
    bool positive = false;  // ci_low > 0
};

SweepSummary run_sweep(const EnsembleConfig& base, std::span<const std::size_t> dims,
                       std::size_t bootstrap = 1000);

// Least-squares slope of y on x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

// Fraction of random (spectrum, uniform state) draws with D(t) < eps at the
// fixed time t > sqrt(2)/9, next to the analytic bound.
ProximityEstimate proximity_probability(std::size_t d, double epsilon, double t,
                                        std::uint64_t trials, std::uint64_t seed);

}  // namespace reclab
