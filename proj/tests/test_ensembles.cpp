#include "doctest.h"
#include "oracles.hpp"

#include "reclab/ensembles.hpp"
#include "reclab/errors.hpp"
#include "reclab/structure.hpp"

#include <cmath>
#include <cstdlib>

using namespace reclab;

namespace {

EnsembleConfig config(std::size_t d, double eps, std::uint64_t trials, std::uint64_t seed = 1) {
    EnsembleConfig c;
    c.d = d;
    c.epsilon = eps;
    c.trials = trials;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_SUITE("ensembles") {

TEST_CASE("config validation and family parsing") {
    auto c = config(4, 0.3, 10);
    CHECK_NOTHROW(c.validate());
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    c = config(4, 0.3, 10);
    parse_family("eta:0.25", c);
    CHECK(c.family == StateFamily::Eta);
    CHECK(c.eta == 0.25);
    CHECK(family_label(c) == "eta:0.25");
    CHECK_THROWS_AS(parse_family("eta:", c), PreconditionError);
    CHECK_THROWS_AS(parse_family("eta:0.2x", c), PreconditionError);
    CHECK_THROWS_AS(parse_family("gaussian", c), PreconditionError);
    c.eta = 1.5;
    CHECK_THROWS_AS(c.validate(), PreconditionError);
    parse_family("uniform", c);
    CHECK(c.family == StateFamily::Uniform);
}

TEST_CASE("trials are reproducible from seed and id") {
    const auto c = config(6, 0.3, 1, 77);
    std::uint64_t k1 = 0, k2 = 0;
    const auto a = draw_trial_state(c, 5, &k1);
    const auto b = draw_trial_state(c, 5, &k2);
    CHECK(k1 == k2);
    for (std::size_t k = 0; k < 6; ++k) CHECK(a.eigenvalues()[k] == b.eigenvalues()[k]);
    const auto other = draw_trial_state(c, 6);
    CHECK(other.eigenvalues()[0] != a.eigenvalues()[0]);
    for (double x : a.eigenvalues()) {
        CHECK(x >= -1.0);
        CHECK(x <= 1.0);
    }
    const auto r1 = sample_trial(c, 3), r2 = sample_trial(c, 3);
    CHECK(r1.t_exit == r2.t_exit);
    CHECK(r1.t_rec == r2.t_rec);
}

TEST_CASE("summary does not depend on the worker count") {
    const auto c = config(4, 0.3, 40, 5);
    setenv("RECLAB_THREADS", "1", 1);
    const auto a = run_ensemble(c);
    setenv("RECLAB_THREADS", "4", 1);
    const auto b = run_ensemble(c);
    unsetenv("RECLAB_THREADS");
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].trial_id == i);
        CHECK(a.records[i].t_exit == b.records[i].t_exit);
        CHECK(a.records[i].t_rec == b.records[i].t_rec);
    }
    CHECK(a.median_log_t_rec == b.median_log_t_rec);
}

TEST_CASE("a single eigenstate never exits") {
    const auto r = sample_trial(config(1, 0.3, 1), 0);
    CHECK(r.exit_status == SearchStatus::NeverExitsAnalytic);
    CHECK_FALSE(r.t_exit);
}

TEST_CASE("per-trial sandwich at d = 4") {
    auto c = config(4, 0.3, 30, 9);
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        const auto r = sample_trial(c, i);
        REQUIRE(r.t_exit);
        CHECK(*r.t_exit + r.miss_tol >= r.mt_lower);
        if (c.epsilon < r.moments.eps_star) {
            REQUIRE(r.qsl_upper);
            CHECK(*r.t_exit <= *r.qsl_upper + r.miss_tol);
        }
    }
}

TEST_CASE("single-trial summary equals the record") {
    const auto s = run_ensemble(config(3, 0.3, 1, 4));
    REQUIRE(s.records.size() == 1);
    const auto& r = s.records[0];
    CHECK(s.t_exit.q50 == r.t_exit);
    CHECK(s.t_exit.q10 == r.t_exit);
    if (r.t_rec) CHECK(s.median_log_t_rec == doctest::Approx(std::log(*r.t_rec)));
}

TEST_CASE("moment windows at large d") {
    auto c = config(2000, 0.05, 20, 2);
    c.recurrence = RecurrencePolicy::None;
    c.check_monotone = false;
    const auto s = run_ensemble(c);
    CHECK(s.window_fraction == 1.0);
    CHECK(s.exit_window_fraction == 1.0);
    for (const auto& r : s.records) {
        CHECK_FALSE(r.rec_attempted);
        CHECK(std::abs(r.moments.mean) < 0.1);
        CHECK(std::abs(r.fourth_raw - 0.2) < 0.1);
    }
}

TEST_CASE("distance increases monotonically up to the exit at eps*") {
    auto c = config(50, 0.1, 20, 3);
    c.recurrence = RecurrencePolicy::None;
    const auto s = run_ensemble(c);
    CHECK(s.monotone_fraction == 1.0);
}

TEST_CASE("eta family separates d_eff from d_supp") {
    auto c = config(101, 0.3, 5, 8);
    parse_family("eta:0.1", c);
    c.recurrence = RecurrencePolicy::None;
    for (std::uint64_t i = 0; i < c.trials; ++i) {
        const auto st = draw_trial_state(c, i);
        int big = 0;
        for (double p : st.probabilities()) big += std::abs(p - 0.1) < 1e-12;
        CHECK(big == 1);
        const auto r = sample_trial(c, i);
        CHECK(std::abs(r.d_eff - 100.0 / 1.81) < 1e-9);
        CHECK(r.d_supp_quarter >= 90);
    }
}

TEST_CASE("recurrence times grow with dimension") {
    auto c = config(2, 0.3, 60, 12);
    c.check_monotone = false;
    const std::vector<std::size_t> dims{2, 3, 4, 5};
    const auto s = run_sweep(c, dims, 200);
    CHECK(s.slope > 0.0);
    CHECK(s.ci_low <= s.slope);
    CHECK(s.slope <= s.ci_high);
    CHECK(s.positive);
    CHECK(s.runs.size() == 4);
}

TEST_CASE("fixed horizons censor recurrence searches") {
    auto c = config(6, 0.2, 20, 13);
    c.recurrence = RecurrencePolicy::Fixed;
    c.rec_horizon = 1.0;
    c.check_monotone = false;
    const auto s = run_ensemble(c);
    CHECK(s.rec_censored > 0);
    CHECK(s.rec_censored + s.rec_found == s.exited);
    for (const auto& r : s.records) {
        if (r.rec_censored()) CHECK(r.rec_horizon == 1.0);
    }
}

TEST_CASE("least squares slope") {
    const std::vector<double> x{1, 2, 3, 4}, y{1, 3, 5, 7};
    CHECK(least_squares_slope(x, y) == doctest::Approx(2.0));
    CHECK_THROWS_AS(least_squares_slope(std::vector<double>{1}, std::vector<double>{1}), PreconditionError);
    CHECK_THROWS_AS(least_squares_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), PreconditionError);
}

TEST_CASE("proximity probability") {
    const auto p = proximity_probability(4, 0.3, 1.0, 20000, 6);
    CHECK(p.trials == 20000u);
    CHECK(p.ci_low <= p.estimate);
    CHECK(p.estimate <= p.ci_high);
    CHECK(p.vacuous);
    const double c = 50 * (1 + 72 / std::sqrt(2.0));
    CHECK(p.bound.log10() == doctest::Approx(std::log10(8 * oracle::kPi / 0.09) + 4 * std::log10(c * 0.3)));
    const auto again = proximity_probability(4, 0.3, 1.0, 20000, 6);
    CHECK(again.hits == p.hits);
    CHECK(proximity_probability(4, 0.01, 1.0, 20000, 6).estimate <= p.estimate);
    CHECK_THROWS_AS(proximity_probability(4, 0.3, 0.1, 10, 1), PreconditionError);
}

}
