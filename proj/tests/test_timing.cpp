#include "doctest.h"
#include "oracles.hpp"

#include "reclab/bounds.hpp"
#include "reclab/errors.hpp"
#include "reclab/timing.hpp"

#include <cmath>

using namespace reclab;

namespace {

SpectralState two_level() { return SpectralState::from_probabilities({-1.0, 1.0}, std::vector{0.5, 0.5}); }

TimingCertificate exit_of(const SpectralState& s, double eps) {
    return find_exit(s, CrossingQuery::defaults(s, eps));
}

TimingCertificate recurrences_of(const SpectralState& s, double eps, int k, std::optional<double> t_max = {}) {
    auto q = CrossingQuery::defaults(s, eps, k);
    q.t_max = t_max;
    return find_recurrences(s, q);
}

}  // namespace

TEST_SUITE("timing") {

TEST_CASE("two-level exit and recurrences follow D = |sin t|") {
    const auto s = two_level();
    const auto e = exit_of(s, 0.1);
    REQUIRE(e.t_exit);
    CHECK(e.status == SearchStatus::Exited);
    CHECK(std::abs(*e.t_exit - std::asin(0.1)) < 1e-8);

    const auto r = recurrences_of(s, 0.1, 2);
    REQUIRE(r.recurrences.size() == 2);
    CHECK(std::abs(r.recurrences[0] - (oracle::kPi - std::asin(0.1))) < 1e-8);
    CHECK(std::abs(r.recurrences[1] - (2 * oracle::kPi - std::asin(0.1))) < 1e-8);
    CHECK(r.status == SearchStatus::Exited);
}

TEST_CASE("eigenstates never exit") {
    const auto s = validate_state({0.3}, {{1.0, 0.0}});
    for (double eps : {0.01, 0.5, 0.99}) {
        const auto c = find_exit(s, CrossingQuery{eps});
        CHECK(c.status == SearchStatus::NeverExitsAnalytic);
        CHECK_FALSE(c.t_exit);
    }
    // degenerate populated levels behave the same
    const auto deg = SpectralState::from_probabilities({2.0, 2.0}, std::vector{0.5, 0.5});
    CHECK(find_exit(deg, CrossingQuery{0.2}).status == SearchStatus::NeverExitsAnalytic);
    CHECK(find_recurrences(deg, CrossingQuery{0.2, 1e-6, {}, 1e-10, 1}).status ==
          SearchStatus::NeverExitsAnalytic);
}

TEST_CASE("three-level exit matches a scalar root of the closed form") {
    const auto s = SpectralState::from_probabilities({-1.0, 0.0, 1.0}, std::vector{1.0 / 3, 1.0 / 3, 1.0 / 3});
    const double target = std::sqrt(1 - 0.04);
    const double ref = oracle::bisect([&](double t) { return (1 + 2 * std::cos(t)) / 3 - target; }, 0.0, 1.5);
    const auto c = exit_of(s, 0.2);
    REQUIRE(c.t_exit);
    CHECK(std::abs(*c.t_exit - ref) < 1e-9);
}

TEST_CASE("crossing times match a dense-grid oracle on commensurate spectra") {
    CounterRng rng(21, 0);
    int compared = 0;
    for (int i = 0; i < 40; ++i) {
        const std::size_t d = 2 + rng.below(2);
        std::vector<double> lam, p;
        double tot = 0;
        for (std::size_t k = 0; k < d; ++k) {
            lam.push_back(static_cast<double>(rng.below(7)) - 3.0);
            p.push_back(rng.uniform() + 0.05);
            tot += p.back();
        }
        for (auto& x : p) x /= tot;
        const auto s = SpectralState::from_probabilities(lam, p);
        const double eps = rng.uniform(0.05, 0.6);
        if (moments(s).stationary() || !finiteness(s, eps).finite) continue;

        const double horizon = 4 * oracle::kPi;
        const auto grid = oracle::crossings(lam, p, eps, horizon, 1e-3);
        if (grid.empty()) continue;
        const auto c = recurrences_of(s, eps, 3, horizon);
        REQUIRE(c.t_exit);
        CHECK(std::abs(*c.t_exit - grid[0].t) < 1e-8);
        CHECK(grid[0].upward);
        std::vector<double> returns;
        for (const auto& x : grid) {
            if (!x.upward) returns.push_back(x.t);
        }
        const std::size_t n = std::min(returns.size(), c.recurrences.size());
        CHECK(c.recurrences.size() == std::min<std::size_t>(3, returns.size()));
        for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(c.recurrences[j] - returns[j]) < 1e-8);
        ++compared;
    }
    CHECK(compared > 20);
}

TEST_CASE("certificate invariants on random states") {
    CounterRng rng(22, 0);
    for (int i = 0; i < 60; ++i) {
        const auto draw = oracle::random_draw(rng, 2 + rng.below(5));
        const auto s = draw.state();
        const auto m = moments(s);
        const double eps = rng.uniform(0.05, 0.5);
        auto q = CrossingQuery::defaults(s, eps, 3);
        q.t_max = 200.0 / m.lipschitz;
        const auto c = find_recurrences(s, q);
        if (!c.t_exit) continue;
        const double slack = m.lipschitz * q.refine_tol + 1e-12;
        CHECK(std::abs(trace_distance_at(s, *c.t_exit) - eps) <= slack + 1e-9);
        CHECK(c.miss_tol == doctest::Approx(m.lipschitz * q.dt_min));
        double prev = *c.t_exit;
        for (double r : c.recurrences) {
            CHECK(r > prev);
            CHECK(std::abs(trace_distance_at(s, r) - eps) <= slack + 1e-9);
            prev = r;
        }
        // no grid point before the exit sits above eps + miss_tol
        for (int j = 0; j < 2000; ++j) {
            const double t = *c.t_exit * j / 2000.0;
            CHECK(oracle::distance(draw.lam, draw.p, t) < eps + c.miss_tol + 1e-12);
        }
    }
}

TEST_CASE("identical queries give identical certificates") {
    CounterRng rng(23, 0);
    const auto s = oracle::random_draw(rng, 5).state();
    auto q = CrossingQuery::defaults(s, 0.3, 2);
    const auto a = find_recurrences(s, q);
    const auto b = find_recurrences(s, q);
    CHECK(a.t_exit == b.t_exit);
    CHECK(a.recurrences == b.recurrences);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.status == b.status);
}

TEST_CASE("a short horizon is reported, with partial recurrences kept") {
    const auto s = two_level();
    auto q = CrossingQuery::defaults(s, 0.1);
    q.t_max = 0.05;
    const auto e = find_exit(s, q);
    CHECK(e.status == SearchStatus::HorizonExhausted);
    CHECK_FALSE(e.t_exit);

    const auto r = recurrences_of(s, 0.1, 3, 5.0);
    CHECK(r.status == SearchStatus::HorizonExhausted);
    REQUIRE(r.recurrences.size() == 1);
    CHECK(std::abs(r.recurrences[0] - (oracle::kPi - std::asin(0.1))) < 1e-8);
}

TEST_CASE("finiteness verdict decides p = (0.8, 0.1, 0.1)") {
    const auto s = SpectralState::from_probabilities({0.0, 1.0, std::sqrt(2.0)}, std::vector{0.8, 0.1, 0.1});
    CHECK(exit_of(s, 0.9).status == SearchStatus::NeverExitsAnalytic);
    const auto c = exit_of(s, 0.7);
    CHECK(c.status == SearchStatus::Exited);
}

TEST_CASE("states ruled out by the finiteness criterion never report an exit") {
    CounterRng rng(24, 0);
    for (int i = 0; i < 100; ++i) {
        const double eps = rng.uniform(0.05, 0.9);
        const double floor = (1 + std::sqrt(1 - eps * eps)) / 2;
        const std::size_t d = 2 + rng.below(6);
        std::vector<double> lam, p(d);
        for (std::size_t k = 0; k < d; ++k) lam.push_back(rng.uniform(-1, 1));
        p[0] = floor + (1 - floor) * rng.uniform(0.01, 0.99);
        for (std::size_t k = 1; k < d; ++k) p[k] = (1 - p[0]) / static_cast<double>(d - 1);
        const auto s = SpectralState::from_probabilities(lam, p);
        auto q = CrossingQuery::defaults(s, eps);
        q.t_max = 1e3;
        CHECK(find_exit(s, q).status != SearchStatus::Exited);
    }
}

TEST_CASE("query preconditions") {
    const auto s = two_level();
    CHECK_THROWS_AS(find_exit(s, CrossingQuery{0.0}), PreconditionError);
    CHECK_THROWS_AS(find_exit(s, CrossingQuery{1.0}), PreconditionError);
    CHECK_THROWS_AS(find_exit(s, CrossingQuery{0.1, 0.0}), PreconditionError);
    CHECK_THROWS_AS(find_exit(s, CrossingQuery{0.1, 1e-3, 1e-4}), PreconditionError);
    CHECK_THROWS_AS(find_exit(s, CrossingQuery{0.1, 1e-6, {}, 0.0}), PreconditionError);
    CHECK_THROWS_AS(find_recurrences(s, CrossingQuery{0.1}), PreconditionError);
}

TEST_CASE("status names round-trip") {
    for (auto st : {SearchStatus::Exited, SearchStatus::NeverExitsAnalytic, SearchStatus::HorizonExhausted}) {
        CHECK(search_status_from_string(to_string(st)) == st);
    }
    CHECK_FALSE(search_status_from_string("Done"));
}

}
