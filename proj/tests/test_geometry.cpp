#include "doctest.h"
#include "oracles.hpp"

#include "reclab/errors.hpp"
#include "reclab/geometry.hpp"
#include "reclab/structure.hpp"

#include <cmath>

using namespace reclab;

TEST_SUITE("geometry") {

TEST_CASE("net sizes") {
    const auto s = build_phase_net(0.5, 3, NetFlavor::StateTorus);
    CHECK(s.resolution() == 13);
    CHECK(s.size() == 169u);
    CHECK(169.0 <= std::pow(8 * oracle::kPi, 2));
    const auto u = build_phase_net(0.5, 3, NetFlavor::UnitaryFamily);
    CHECK(u.resolution() == 26);
    CHECK(u.size() == 676u);
    CHECK(build_phase_net(0.3, 1, NetFlavor::StateTorus).size() == 1u);

    for (double eps : {0.05, 0.3, 0.8}) {
        for (std::size_t d : {1u, 2u, 4u, 6u}) {
            const auto ns = build_phase_net(eps, d, NetFlavor::StateTorus);
            const auto nu = build_phase_net(eps, d, NetFlavor::UnitaryFamily);
            CHECK(ns.resolution() == static_cast<std::size_t>(std::ceil(2 * oracle::kPi / eps)));
            CHECK(nu.resolution() == static_cast<std::size_t>(std::ceil(4 * oracle::kPi / eps)));
            CHECK(ns.log10_size() <= (d - 1) * std::log10(4 * oracle::kPi / eps) + 1e-12);
            CHECK(nu.log10_size() <= (d - 1) * std::log10(8 * oracle::kPi / eps) + 1e-12);
            CHECK(ns.log10_size() == doctest::Approx((d - 1) * std::log10(double(ns.resolution()))));
        }
    }
}

TEST_CASE("enumeration cap and enumeration contents") {
    const auto net = build_phase_net(0.5, 3, NetFlavor::StateTorus);
    const auto pts = net.enumerate();
    CHECK(pts.size() == 169);
    for (const auto& x : pts) CHECK(x[0] == 0.0);
    CHECK_THROWS_AS(net.enumerate(100), PreconditionError);
    const auto huge = build_phase_net(0.01, 200, NetFlavor::UnitaryFamily);
    CHECK_FALSE(huge.size());
    CHECK_THROWS_AS(huge.enumerate(), PreconditionError);
    std::vector<double> phases(200, 1.0);
    CHECK(huge.nearest(phases).size() == 200);
}

TEST_CASE("nearest net point agrees with exhaustive search") {
    const auto net = build_phase_net(0.7, 3, NetFlavor::StateTorus);
    const auto pts = net.enumerate();
    CounterRng rng(51, 0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> phi{rng.phase(), rng.phase(), rng.phase()};
        const auto near = net.nearest(phi);
        auto sep = [&](const std::vector<double>& x) {
            double worst = 0;
            for (std::size_t k = 1; k < 3; ++k) {
                double dlt = std::remainder(phi[k] - phi[0] - x[k], 2 * oracle::kPi);
                worst = std::max(worst, std::abs(dlt));
            }
            return worst;
        };
        double best = 1e9;
        for (const auto& x : pts) best = std::min(best, sep(x));
        CHECK(sep(near) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("covering checks pass at the nominal scale") {
    for (auto [d, eps] : {std::pair{2u, 0.3}, {3u, 0.5}, {3u, 0.3}, {4u, 0.5}, {3u, 0.8}}) {
        const auto r = covering_check(build_phase_net(eps, d, NetFlavor::StateTorus), 20000, 7);
        CHECK(r.pass);
        CHECK(r.max_distance <= eps);
        CHECK(r.max_distance > 0.0);
        CHECK(r.samples == 20000u);
        const auto u = covering_check(build_phase_net(eps, d, NetFlavor::UnitaryFamily), 20000, 7);
        CHECK(u.pass);
        CHECK(u.max_distance <= eps / 2);
    }
    CHECK_THROWS_AS(covering_check(build_phase_net(0.5, 3, NetFlavor::StateTorus), 0, 1), PreconditionError);
}

TEST_CASE("covering check is reproducible and independent of chunk scheduling") {
    const auto net = build_phase_net(0.4, 3, NetFlavor::StateTorus);
    const auto a = covering_check(net, 10000, 99);
    const auto b = covering_check(net, 10000, 99);
    CHECK(a.max_distance == b.max_distance);
    const auto c = covering_check(net, 10000, 100);
    CHECK(c.max_distance != a.max_distance);
}

TEST_CASE("non-uniform base amplitudes and the pinned reduced net") {
    const auto base = validate_state({0.0, 1.0, 2.0}, {{std::sqrt(0.98), 0}, {0.1, 0}, {0.1, 0}});
    const auto full = covering_check(build_phase_net(0.5, 3, NetFlavor::StateTorus, &base), 20000, 3);
    CHECK(full.pass);

    const auto supp = effective_support(base, 0.5 * 0.5 / 4);
    CHECK(supp.indices == std::vector<std::size_t>{0});
    const auto red = build_reduced_phase_net(0.5, base, supp);
    CHECK(red.free_coordinates() == 0);
    CHECK(red.size() == 1u);
    const auto r = covering_check(red, 100000, 3);
    CHECK(r.pass);
    // worst case is both small components opposite the large one
    CHECK(r.max_distance <= std::sqrt(1 - 0.96 * 0.96) + 1e-12);
}

TEST_CASE("reduced net pins coordinates outside the support") {
    std::vector<double> p{0.4, 0.3, 0.28, 0.02};
    const auto base = SpectralState::from_probabilities({0, 1, 2, 3}, p);
    const auto supp = effective_support(base, 0.05);
    REQUIRE(supp.size() == 3);
    const auto net = build_reduced_phase_net(0.5, base, supp);
    CHECK(net.free_coordinates() == 2);
    CHECK(net.resolution() == static_cast<std::size_t>(std::ceil(4 * oracle::kPi / 0.5)));
    CHECK_FALSE(net.is_free(3));
    CHECK(covering_check(net, 20000, 5).pass);
}

TEST_CASE("norm sandwich between trace and min-phase Euclidean distances") {
    CounterRng rng(52, 0);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t d = 1 + rng.below(8);
        const auto a = oracle::random_draw(rng, d).amps;
        const auto b = oracle::random_draw(rng, d).amps;
        const double tr = pure_trace_distance(a, b);
        const double eu = min_phase_euclidean(a, b);
        // compared squared: both are square roots of quantities that round near 0
        CHECK(eu * eu / 2 <= tr * tr + 1e-10);
        CHECK(tr * tr <= eu * eu + 1e-10);
    }
}

TEST_CASE("diamond distance examples") {
    const std::vector<double> z2{0, 0}, z3{0, 0, 0};
    CHECK(std::abs(diagonal_diamond_distance(std::vector<double>{0, oracle::kPi}, z2) - std::sqrt(2.0)) < 1e-9);
    CHECK(diagonal_diamond_distance(z3, z3) == doctest::Approx(0.0));
    CHECK(diagonal_diamond_distance(std::vector<double>{0, 0.2}, z2) == doctest::Approx(2 * std::sin(0.05)));
    CHECK(diagonal_diamond_distance(std::vector<double>{0, 0.2}, z2) == doctest::Approx(0.0999583).epsilon(1e-6));
    CHECK(diagonal_diamond_distance(std::vector<double>{1.3}, std::vector<double>{-2.0}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(diagonal_diamond_distance(z2, z3), PreconditionError);
    CHECK_THROWS_AS(diagonal_diamond_distance(std::vector<double>{}, std::vector<double>{}), PreconditionError);
}

TEST_CASE("closed-form diamond distance matches the phase-grid scan") {
    CounterRng rng(53, 0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = 1 + rng.below(32);
        std::vector<double> a(k), b(k);
        for (auto& x : a) x = rng.uniform(-10, 10);
        for (auto& x : b) x = rng.uniform(-10, 10);
        const double exact = diagonal_diamond_distance(a, b);
        CHECK(std::abs(exact - diamond_distance_grid(a, b, 20000)) <= 2 * oracle::kPi / 20000);
        // chordal distance of any single global phase bounds it from above
        double worst = 0;
        for (std::size_t j = 0; j < k; ++j) worst = std::max(worst, std::abs(std::polar(1.0, a[j] - b[j]) - 1.0));
        CHECK(exact <= worst + 1e-12);
    }
}

TEST_CASE("flavor names") {
    CHECK(net_flavor_from_string("state") == NetFlavor::StateTorus);
    CHECK(net_flavor_from_string("unitary") == NetFlavor::UnitaryFamily);
    CHECK_FALSE(net_flavor_from_string("torus"));
    CHECK(to_string(NetFlavor::UnitaryFamily) == "unitary");
}

}
