#pragma once

#include <algorithm>
#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "timdof/topology.hpp"

namespace timdof {

// Unordered message pair, stored with the smaller endpoint first so edge
// lists are byte-stable.
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Messages i and j are alignment-connected when both are heard by a receiver
// that desires neither: {i,j} present iff some k has i,j in M_k. (k is
// automatically distinct from i and j because k never appears in M_k.)
inline std::vector<Edge> build_alignment_graph(const NetworkTopology& t) {
    std::set<Edge> edges;
    for (int k = 1; k <= t.users; ++k) {
        const auto m = t.interferers(k);
        for (size_t a = 0; a < m.size(); ++a)
            for (size_t b = a + 1; b < m.size(); ++b)
                edges.insert(make_edge(m[a], m[b]));
    }
    return {edges.begin(), edges.end()};
}

// Conflict edge {i,j} iff transmitter j is heard where message i is desired,
// or vice versa. The undirected edge is what the bound machinery uses;
// provenance (which receiver hears which transmitter) is kept separately
// for reporting.
inline std::vector<Edge> build_conflict_graph(const NetworkTopology& t) {
    std::set<Edge> edges;
    for (int k = 1; k <= t.users; ++k)
        for (int l : t.interferers(k)) edges.insert(make_edge(k, l));
    return {edges.begin(), edges.end()};
}

// For each conflict edge, the (receiver, transmitter) pairs that created it.
inline std::map<Edge, std::vector<std::pair<int, int>>>
conflict_provenance(const NetworkTopology& t) {
    std::map<Edge, std::vector<std::pair<int, int>>> prov;
    for (int k = 1; k <= t.users; ++k)
        for (int l : t.interferers(k)) prov[make_edge(k, l)].push_back({k, l});
    return prov;
}

// Connected components of the alignment graph, singletons included.
// Canonical order: sets sorted by minimum element, members ascending.
inline std::vector<std::vector<int>> compute_alignment_sets(const std::vector<Edge>& edges,
                                                            int users) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(users) + 1);
    for (const auto& [a, b] : edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    std::vector<std::vector<int>> sets;
    std::vector<bool> seen(static_cast<size_t>(users) + 1, false);
    for (int v = 1; v <= users; ++v) {
        if (seen[static_cast<size_t>(v)]) continue;
        std::vector<int> comp;
        std::queue<int> q;
        q.push(v);
        seen[static_cast<size_t>(v)] = true;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            comp.push_back(u);
            for (int w : adj[static_cast<size_t>(u)])
                if (!seen[static_cast<size_t>(w)]) {
                    seen[static_cast<size_t>(w)] = true;
                    q.push(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        sets.push_back(std::move(comp));
    }
    std::sort(sets.begin(), sets.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return sets;
}

inline std::vector<Edge> find_internal_conflicts(const std::vector<std::vector<int>>& sets,
                                                 const std::vector<Edge>& conflict_edges,
                                                 int users) {
    std::vector<int> set_of(static_cast<size_t>(users) + 1, -1);
    for (size_t s = 0; s < sets.size(); ++s)
        for (int v : sets[s]) set_of[static_cast<size_t>(v)] = static_cast<int>(s);
    std::vector<Edge> internal;
    for (const auto& e : conflict_edges)
        if (set_of[static_cast<size_t>(e.first)] == set_of[static_cast<size_t>(e.second)])
            internal.push_back(e);
    return internal;
}

// Result of the reduced-graph bipartiteness test: either a 2-coloring or
// one odd cycle (as a sequence of reduced-vertex indices).
struct BipartiteResult {
    bool bipartite = true;
    std::vector<int> coloring;  // per reduced vertex, 0/1; empty when not bipartite
    std::vector<int> odd_cycle; // reduced-vertex indices, odd length; empty when bipartite
};

// BFS layering. On a same-color edge inside one BFS tree the two tree paths
// to the lowest common ancestor plus the offending edge close an odd cycle.
inline BipartiteResult is_bipartite(int n, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const auto& [a, b] : edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());

    BipartiteResult res;
    std::vector<int> color(static_cast<size_t>(n), -1);
    std::vector<int> parent(static_cast<size_t>(n), -1);
    std::vector<int> depth(static_cast<size_t>(n), 0);
    for (int root = 0; root < n; ++root) {
        if (color[static_cast<size_t>(root)] != -1) continue;
        std::queue<int> q;
        q.push(root);
        color[static_cast<size_t>(root)] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[static_cast<size_t>(u)]) {
                if (color[static_cast<size_t>(v)] == -1) {
                    color[static_cast<size_t>(v)] = color[static_cast<size_t>(u)] ^ 1;
                    parent[static_cast<size_t>(v)] = u;
                    depth[static_cast<size_t>(v)] = depth[static_cast<size_t>(u)] + 1;
                    q.push(v);
                } else if (color[static_cast<size_t>(v)] == color[static_cast<size_t>(u)]) {
                    std::vector<int> pu = {u}, pv = {v};
                    int x = u, y = v;
                    while (depth[static_cast<size_t>(x)] > depth[static_cast<size_t>(y)]) {
                        x = parent[static_cast<size_t>(x)];
                        pu.push_back(x);
                    }
                    while (depth[static_cast<size_t>(y)] > depth[static_cast<size_t>(x)]) {
                        y = parent[static_cast<size_t>(y)];
                        pv.push_back(y);
                    }
                    while (x != y) {
                        x = parent[static_cast<size_t>(x)];
                        pu.push_back(x);
                        y = parent[static_cast<size_t>(y)];
                        pv.push_back(y);
                    }
                    // pu ends at the common ancestor, pv stops just short
                    pv.pop_back();
                    res.bipartite = false;
                    res.odd_cycle.assign(pu.rbegin(), pu.rend());
                    res.odd_cycle.insert(res.odd_cycle.end(), pv.begin(), pv.end());
                    // rotate so the smallest vertex leads (stable output)
                    auto mn = std::min_element(res.odd_cycle.begin(), res.odd_cycle.end());
                    std::rotate(res.odd_cycle.begin(), mn, res.odd_cycle.end());
                    return res;
                }
            }
        }
    }
    res.coloring = std::move(color);
    return res;
}

// Everything Definitions 1-3 derive from one topology.
struct GraphBundle {
    NetworkTopology topology;
    std::vector<Edge> alignment_edges;
    std::vector<Edge> conflict_edges;
    std::map<Edge, std::vector<std::pair<int, int>>> conflict_sources;
    std::vector<std::vector<int>> sets; // partition of [K], canonical order
    std::vector<int> set_of;            // user -> index into sets (1-based user)
    std::vector<int> reduced_vertices;  // indices into sets with |set| >= 2
    std::vector<Edge> reduced_edges;    // pairs of positions in reduced_vertices
    std::vector<Edge> internal_conflicts;
    bool reduced_bipartite = true;
    std::vector<int> reduced_coloring;    // when bipartite
    std::vector<int> reduced_odd_witness; // when not: reduced-vertex positions

    const std::vector<int>& reduced_set(int rv) const {
        return sets[static_cast<size_t>(reduced_vertices[static_cast<size_t>(rv)])];
    }
    int reduced_count() const { return static_cast<int>(reduced_vertices.size()); }
};

inline GraphBundle build_bundle(const NetworkTopology& t) {
    GraphBundle b;
    b.topology = t;
    b.alignment_edges = build_alignment_graph(t);
    b.conflict_edges = build_conflict_graph(t);
    b.conflict_sources = conflict_provenance(t);
    b.sets = compute_alignment_sets(b.alignment_edges, t.users);
    b.set_of.assign(static_cast<size_t>(t.users) + 1, -1);
    for (size_t s = 0; s < b.sets.size(); ++s)
        for (int v : b.sets[s]) b.set_of[static_cast<size_t>(v)] = static_cast<int>(s);
    b.internal_conflicts = find_internal_conflicts(b.sets, b.conflict_edges, t.users);

    for (size_t s = 0; s < b.sets.size(); ++s)
        if (b.sets[s].size() >= 2) b.reduced_vertices.push_back(static_cast<int>(s));
    std::vector<int> rv_pos(b.sets.size(), -1);
    for (size_t i = 0; i < b.reduced_vertices.size(); ++i)
        rv_pos[static_cast<size_t>(b.reduced_vertices[i])] = static_cast<int>(i);

    std::set<Edge> redges;
    for (const auto& [a, c] : b.conflict_edges) {
        int sa = b.set_of[static_cast<size_t>(a)];
        int sc = b.set_of[static_cast<size_t>(c)];
        if (sa == sc) continue;
        int ra = rv_pos[static_cast<size_t>(sa)];
        int rc = rv_pos[static_cast<size_t>(sc)];
        if (ra < 0 || rc < 0) continue;
        redges.insert(make_edge(ra, rc));
    }
    b.reduced_edges.assign(redges.begin(), redges.end());

    auto bip = is_bipartite(b.reduced_count(), b.reduced_edges);
    b.reduced_bipartite = bip.bipartite;
    b.reduced_coloring = std::move(bip.coloring);
    b.reduced_odd_witness = std::move(bip.odd_cycle);
    return b;
}

} // namespace timdof
