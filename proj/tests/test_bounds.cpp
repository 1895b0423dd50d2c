#include <catch2/catch_amalgamated.hpp>

#include "naive_oracles.hpp"
#include "timdof/bounds.hpp"

using namespace timdof;

TEST_CASE("theorem-1 bound values") {
    CHECK(theorem1_bound_value(CycleParams(3, 0, 3)) == Rational(4, 9));
    CHECK(theorem1_bound_value(CycleParams(3, 1, 13)) == Rational(14, 29));
    CHECK(theorem1_bound_value(CycleParams(5, 0, 5)) == Rational(7, 15));
    CHECK(theorem1_bound_value(CycleParams(3, 0, 3)).str() == "4/9");
}

TEST_CASE("bound is monotone in m + 2 l_sigma and stays in [4/9, 1/2)") {
    Rational prev(0, 1);
    for (int m : {3, 5, 7}) {
        for (int ls = m; ls <= m + 10; ++ls) {
            const auto v = theorem1_bound_value(CycleParams(m, 0, ls));
            CHECK(v >= Rational(4, 9));
            CHECK(v < Rational(1, 2));
            // strictly increasing in the denominator argument
            const auto next = theorem1_bound_value(CycleParams(m, 0, ls + 1));
            CHECK(v < next);
            (void)prev;
        }
    }
}

TEST_CASE("half-DoF feasibility on the fixtures") {
    const auto sq = half_dof_feasible(build_bundle(load_fixture("square8")));
    CHECK(sq.feasible);
    CHECK(sq.c1_ok);
    CHECK(sq.c2_ok);

    const auto hex = half_dof_feasible(build_bundle(load_fixture("hexnet6")));
    CHECK_FALSE(hex.feasible);
    CHECK(hex.c1_ok);
    CHECK_FALSE(hex.c2_ok);

    const auto ic = half_dof_feasible(build_bundle(load_fixture("iconflict3")));
    CHECK_FALSE(ic.feasible);
    CHECK_FALSE(ic.c1_ok);
}

TEST_CASE("analyze: hexnet6 and paper7 give exactly 4/9") {
    for (const char* name : {"hexnet6", "paper7"}) {
        const auto rep = analyze(load_fixture(name));
        REQUIRE(rep.theorem1_bound.has_value());
        CHECK(*rep.theorem1_bound == Rational(4, 9));
        CHECK_FALSE(rep.half_dof_feasible);
        REQUIRE(rep.certificate.has_value());
        CHECK(verify_completed_cycle(rep.bundle, *rep.certificate).ok);
        CHECK_FALSE(rep.possibly_not_tightest);
        CHECK(rep.notes.find("4/9") != std::string::npos);
    }
}

TEST_CASE("analyze: square8 feasible, no bound") {
    const auto rep = analyze(load_fixture("square8"));
    CHECK(rep.half_dof_feasible);
    CHECK_FALSE(rep.theorem1_bound.has_value());
    CHECK_FALSE(rep.certificate.has_value());
    CHECK(rep.notes.find("1/2") != std::string::npos);
    CHECK(rep.notes.find("optimal") != std::string::npos);
}

TEST_CASE("analyze: iconflict3 reports the C1 violation") {
    const auto rep = analyze(load_fixture("iconflict3"));
    CHECK_FALSE(rep.half_dof_feasible);
    CHECK_FALSE(rep.c1_ok);
    CHECK(rep.notes.find("strictly below 1/2") != std::string::npos);
    // reduced graph of iconflict3 is a single vertex: no odd cycle, no bound
    CHECK_FALSE(rep.theorem1_bound.has_value());
}

TEST_CASE("analyze: interference-free network does not claim 1/2 optimality") {
    const auto rep = analyze(parse_topology("users 2\nrx 1: 1\nrx 2: 2"));
    CHECK(rep.half_dof_feasible);
    CHECK(rep.notes.find("not asserted") != std::string::npos);
}

TEST_CASE("every emitted bound lies in [4/9, 1/2) with a verifiable certificate") {
    SplitMix64 rng(0xb0b0b0b0);
    int bounded = 0;
    for (int i = 0; i < 300 && bounded < 40; ++i) {
        NetworkTopology t = (i % 2 == 0) ? naive::ring_topology(rng, 3 + 2 * static_cast<int>(rng.next_below(2)))
                                         : random_topology(rng, 8);
        const auto rep = analyze(t);
        if (!rep.theorem1_bound) continue;
        ++bounded;
        CHECK(*rep.theorem1_bound >= Rational(4, 9));
        CHECK(*rep.theorem1_bound < Rational(1, 2));
        REQUIRE(rep.certificate.has_value());
        CHECK(verify_completed_cycle(rep.bundle, *rep.certificate).ok);
    }
    CHECK(bounded >= 20);
}
