#include <catch2/catch_amalgamated.hpp>

#include "naive_oracles.hpp"
#include "timdof/graphs.hpp"

using namespace timdof;

TEST_CASE("alignment graph on the fixtures") {
    CHECK(build_alignment_graph(load_fixture("iconflict3")) == std::vector<Edge>{{1, 2}});
    CHECK(build_alignment_graph(load_fixture("hexnet6")) ==
          std::vector<Edge>{{1, 2}, {3, 4}, {5, 6}});
    // all M_k empty: no edges
    const auto t = parse_topology("users 3\nrx 1: 1\nrx 2: 2\nrx 3: 3");
    CHECK(build_alignment_graph(t).empty());
}

TEST_CASE("conflict graph on the fixtures") {
    CHECK(build_conflict_graph(load_fixture("iconflict3")) ==
          std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}});
    CHECK(build_conflict_graph(parse_topology("users 1\nrx 1: 1")).empty());
    CHECK(build_conflict_graph(load_fixture("hexnet6")) ==
          std::vector<Edge>{{1, 3}, {1, 5}, {1, 6}, {2, 3}, {3, 5}, {4, 5}});
}

TEST_CASE("alignment sets") {
    CHECK(compute_alignment_sets({}, 3) == std::vector<std::vector<int>>{{1}, {2}, {3}});
    const auto paper7 = build_bundle(load_fixture("paper7"));
    CHECK(paper7.sets == std::vector<std::vector<int>>{{1, 2}, {3, 5, 6}, {4, 7}});
    const auto hexnet6 = build_bundle(load_fixture("hexnet6"));
    CHECK(hexnet6.sets == std::vector<std::vector<int>>{{1, 2}, {3, 4}, {5, 6}});
}

TEST_CASE("internal conflicts") {
    CHECK(build_bundle(load_fixture("iconflict3")).internal_conflicts ==
          std::vector<Edge>{{1, 2}});
    CHECK(build_bundle(load_fixture("paper7")).internal_conflicts.empty());
    CHECK(build_bundle(load_fixture("square8")).internal_conflicts.empty());
}

TEST_CASE("reduced graph shapes") {
    const auto hex = build_bundle(load_fixture("hexnet6"));
    CHECK(hex.reduced_count() == 3);
    CHECK(hex.reduced_edges == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}}); // triangle
    CHECK_FALSE(hex.reduced_bipartite);

    const auto sq = build_bundle(load_fixture("square8"));
    CHECK(sq.reduced_count() == 4);
    CHECK(sq.reduced_edges.size() == 4);
    CHECK(sq.reduced_bipartite);

    const auto empty = build_bundle(parse_topology("users 2\nrx 1: 1\nrx 2: 2"));
    CHECK(empty.reduced_count() == 0);
    CHECK(empty.reduced_bipartite);
}

TEST_CASE("bipartite witness is a genuine odd cycle") {
    const auto hex = build_bundle(load_fixture("hexnet6"));
    const auto& cyc = hex.reduced_odd_witness;
    REQUIRE(cyc.size() == 3);
    std::set<Edge> edges(hex.reduced_edges.begin(), hex.reduced_edges.end());
    for (size_t i = 0; i < cyc.size(); ++i)
        CHECK(edges.count(make_edge(cyc[i], cyc[(i + 1) % cyc.size()])));
}

namespace {

void compare_with_naive(const NetworkTopology& t) {
    const auto bundle = build_bundle(t);
    REQUIRE(bundle.alignment_edges == naive::alignment_edges(t));
    REQUIRE(bundle.conflict_edges == naive::conflict_edges(t));
    REQUIRE(bundle.sets == naive::alignment_sets(bundle.alignment_edges, t.users));
    REQUIRE(bundle.internal_conflicts ==
            naive::internal_conflicts(bundle.sets, bundle.conflict_edges));
    const auto [nverts, nedges] = naive::reduced_graph(bundle.sets, bundle.conflict_edges);
    REQUIRE(bundle.reduced_vertices == nverts);
    REQUIRE(bundle.reduced_edges == nedges);
    REQUIRE(bundle.reduced_bipartite == naive::bipartite(bundle.reduced_count(), bundle.reduced_edges));

    // M_k is a clique under alignment edges
    std::set<Edge> align(bundle.alignment_edges.begin(), bundle.alignment_edges.end());
    for (int k = 1; k <= t.users; ++k) {
        const auto m = t.interferers(k);
        for (size_t a = 0; a < m.size(); ++a)
            for (size_t b = a + 1; b < m.size(); ++b)
                REQUIRE(align.count(make_edge(m[a], m[b])));
    }

    // the bipartite branch always carries its evidence
    if (bundle.reduced_bipartite) {
        REQUIRE(bundle.reduced_odd_witness.empty());
        for (const auto& [a, b] : bundle.reduced_edges)
            REQUIRE(bundle.reduced_coloring[static_cast<size_t>(a)] !=
                    bundle.reduced_coloring[static_cast<size_t>(b)]);
    } else {
        const auto& cyc = bundle.reduced_odd_witness;
        REQUIRE(cyc.size() % 2 == 1);
        REQUIRE(cyc.size() >= 3);
        std::set<Edge> edges(bundle.reduced_edges.begin(), bundle.reduced_edges.end());
        std::set<int> distinct(cyc.begin(), cyc.end());
        REQUIRE(distinct.size() == cyc.size());
        for (size_t i = 0; i < cyc.size(); ++i)
            REQUIRE(edges.count(make_edge(cyc[i], cyc[(i + 1) % cyc.size()])));
    }
}

} // namespace

TEST_CASE("definition oracle: exhaustive small networks") {
    for (int users = 1; users <= 4; ++users)
        naive::for_each_topology(users, [](const NetworkTopology& t) { compare_with_naive(t); });
}

TEST_CASE("definition oracle: random and structured networks") {
    SplitMix64 rng(0x9a9a0001);
    for (int i = 0; i < 400; ++i) compare_with_naive(random_topology(rng, 8));
    for (int i = 0; i < 60; ++i) {
        const int ring = 3 + static_cast<int>(rng.next_below(3)); // 3..5
        compare_with_naive(naive::ring_topology(rng, ring));
    }
}
