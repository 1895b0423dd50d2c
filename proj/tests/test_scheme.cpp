#include <catch2/catch_amalgamated.hpp>

#include "naive_oracles.hpp"
#include "timdof/scheme.hpp"

using namespace timdof;

TEST_CASE("2-coloring of square8's set-conflict graph") {
    const auto b = build_bundle(load_fixture("square8"));
    const auto col = color_set_conflict_graph(b, 2);
    REQUIRE(col.feasible);
    // canonical order {1,2},{3,4},{5,6},{7,8}; BFS from the first fixes labels
    CHECK(col.colors == std::vector<int>{1, 2, 1, 2});
}

TEST_CASE("paper7 needs three colors") {
    const auto b = build_bundle(load_fixture("paper7"));
    CHECK_FALSE(color_set_conflict_graph(b, 2).feasible);
    const auto col = color_set_conflict_graph(b, 3);
    REQUIRE(col.feasible);
    std::set<int> distinct(col.colors.begin(), col.colors.end());
    CHECK(distinct.size() == 3);
    // proper on every set-conflict edge
    for (const auto& [a, c] : set_conflict_edges(b))
        CHECK(col.colors[static_cast<size_t>(a)] != col.colors[static_cast<size_t>(c)]);
}

TEST_CASE("half scheme per fixture") {
    const auto sq = build_half_scheme(build_bundle(load_fixture("square8")));
    REQUIRE(sq.feasible());
    CHECK(sq.scheme->slots == 2);
    CHECK(sq.scheme->nominal_dof == Rational(1, 2));
    CHECK_FALSE(sq.scheme->common_active);

    CHECK_FALSE(build_half_scheme(build_bundle(load_fixture("hexnet6"))).feasible());
    const auto ic = build_half_scheme(build_bundle(load_fixture("iconflict3")));
    CHECK_FALSE(ic.feasible());
    CHECK(ic.reason.find("internal conflict") != std::string::npos);
}

TEST_CASE("half scheme: C1+C2 hold but singletons break 2-colorability") {
    // three singleton sets in a conflict triangle; 1/2 is promised but this
    // constructor cannot realize it
    const auto t = parse_topology("users 3\nrx 1: 1 2\nrx 2: 2 3\nrx 3: 3 1");
    const auto b = build_bundle(t);
    REQUIRE(b.internal_conflicts.empty());
    REQUIRE(b.reduced_bipartite);
    const auto r = build_half_scheme(b);
    CHECK_FALSE(r.feasible());
    CHECK(r.reason.find("constructor incomplete") != std::string::npos);
}

TEST_CASE("four-ninths scheme per fixture") {
    for (const char* name : {"paper7", "hexnet6"}) {
        const auto b = build_bundle(load_fixture(name));
        const auto r = build_four_ninths_scheme(b);
        REQUIRE(r.feasible());
        CHECK(r.scheme->slots == 3);
        CHECK(r.scheme->common_active);
        CHECK(r.scheme->nominal_dof == Rational(4, 9));
        const auto v = validate_scheme_structure(*r.scheme, b.topology);
        CHECK(v.pass);
    }
    CHECK_FALSE(build_four_ninths_scheme(build_bundle(load_fixture("iconflict3"))).feasible());
}

TEST_CASE("four-ninths rejects wide MACs") {
    // receiver 4 hears three interferers
    const auto t = parse_topology("users 4\nrx 1: 1\nrx 2: 2\nrx 3: 3\nrx 4: 4 1 2 3");
    const auto r = build_four_ninths_scheme(build_bundle(t));
    CHECK_FALSE(r.feasible());
    CHECK(r.reason.find("more than 2 interferers") != std::string::npos);
}

TEST_CASE("paper7 free slots match the walkthrough") {
    const auto topo = load_fixture("paper7");
    const auto b = build_bundle(topo);
    const auto r = build_four_ninths_scheme(b);
    REQUIRE(r.feasible());
    const auto v = validate_scheme_structure(*r.scheme, topo);
    REQUIRE(v.pass);
    // receiver 1 hears users 1 (set {1,2}) and 3,5 (set {3,5,6}); its free
    // slot is the color of neither set
    const auto& s = *r.scheme;
    const int c12 = s.set_color[0];  // set {1,2}
    const int c356 = s.set_color[1]; // set {3,5,6}
    const int free1 = v.receivers[0].free_slot;
    CHECK(free1 != c12);
    CHECK(free1 != c356);
}

TEST_CASE("validation detects a topology mismatch") {
    const auto paper7 = load_fixture("paper7");
    const auto square8 = load_fixture("square8");
    const auto r = build_four_ninths_scheme(build_bundle(paper7));
    REQUIRE(r.feasible());
    CHECK_THROWS_AS(validate_scheme_structure(*r.scheme, square8), scheme_error);
}

TEST_CASE("structural theorem: heard sets span at most two colors") {
    SplitMix64 rng(0x5c4e4e01);
    int checked = 0;
    for (int i = 0; i < 400 && checked < 80; ++i) {
        NetworkTopology t = (i % 3 == 0) ? naive::ring_topology(rng, 3 + static_cast<int>(rng.next_below(3)))
                                         : random_topology(rng, 8);
        const auto b = build_bundle(t);
        if (!b.internal_conflicts.empty()) continue;
        const auto col = color_set_conflict_graph(b, 3);
        if (!col.feasible) continue;
        ++checked;
        for (int k = 1; k <= t.users; ++k) {
            std::set<int> colors;
            for (int l : t.heard_of(k))
                colors.insert(col.colors[static_cast<size_t>(b.set_of[static_cast<size_t>(l)])]);
            REQUIRE(colors.size() <= 2);
        }
    }
    CHECK(checked >= 40);
}

TEST_CASE("successful constructors always validate") {
    SplitMix64 rng(0x5c4e4e02);
    for (int i = 0; i < 200; ++i) {
        const auto t = random_topology(rng, 8);
        const auto b = build_bundle(t);
        if (auto half = build_half_scheme(b); half.feasible()) {
            const auto v = validate_scheme_structure(*half.scheme, t);
            for (const auto& chk : v.receivers) REQUIRE(chk.private_ok);
        }
        if (auto f9 = build_four_ninths_scheme(b); f9.feasible()) {
            REQUIRE(validate_scheme_structure(*f9.scheme, t).pass);
        }
    }
}
