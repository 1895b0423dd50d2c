#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "timdof/graphs.hpp"

namespace timdof {

class not_applicable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class invalid_cycle : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Parameters of a completed cycle: m conflict edges, m2 sets entered and
// exited at the same message, l_sigma the summed per-set path budget.
// The bound objective is m + 2*l_sigma, never below 9.
struct CycleParams {
    int m = 0;
    int m2 = 0;
    int l_sigma = 0;
    int objective = 0;

    CycleParams() = default;
    CycleParams(int m_, int m2_, int ls) : m(m_), m2(m2_), l_sigma(ls), objective(m_ + 2 * ls) {}

    friend bool operator==(const CycleParams& a, const CycleParams& b) {
        return a.m == b.m && a.m2 == b.m2 && a.l_sigma == b.l_sigma && a.objective == b.objective;
    }
};

// A message-level cycle realizing an odd reduced-graph cycle: m conflict
// edges alternating with alignment paths inside each set.
//
//   conflict_edges[j] = (exit_j, entry_{j+1}), indices cyclic
//   paths[j]          = alignment path entry_j .. exit_j inside sets[j],
//                       empty when entry_j == exit_j
struct CompletedCycle {
    std::vector<std::vector<int>> sets; // member lists, cycle order
    std::vector<std::pair<int, int>> conflict_edges;
    std::vector<std::vector<int>> paths;
    CycleParams params;

    int entry_of(int j) const {
        const int m = static_cast<int>(sets.size());
        return conflict_edges[static_cast<size_t>((j + m - 1) % m)].second;
    }
    int exit_of(int j) const { return conflict_edges[static_cast<size_t>(j)].first; }
};

namespace detail {

inline std::vector<std::vector<int>> adjacency(int n, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const auto& [a, b] : edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    return adj;
}

// Rotate to the minimum vertex, then pick the direction whose second
// element is smaller. Identifies a cycle up to rotation and reflection.
inline std::vector<int> canonical_cycle(std::vector<int> cyc) {
    auto mn = std::min_element(cyc.begin(), cyc.end());
    std::rotate(cyc.begin(), mn, cyc.end());
    if (cyc.size() > 2 && cyc[1] > cyc.back()) {
        std::reverse(cyc.begin() + 1, cyc.end());
    }
    return cyc;
}

// Reduce an odd closed walk to a simple odd cycle: split at a repeated
// vertex and keep the odd half (exactly one half is odd).
inline std::vector<int> simplify_odd_walk(std::vector<int> walk) {
    // walk is closed: walk.front() == walk.back(); drop the duplicate
    walk.pop_back();
    bool changed = true;
    while (changed) {
        changed = false;
        const size_t n = walk.size();
        std::map<int, size_t> first_pos;
        for (size_t i = 0; i < n; ++i) {
            auto it = first_pos.find(walk[i]);
            if (it == first_pos.end()) {
                first_pos[walk[i]] = i;
                continue;
            }
            const size_t p = it->second, q = i;
            std::vector<int> inner(walk.begin() + static_cast<long>(p),
                                   walk.begin() + static_cast<long>(q));
            std::vector<int> outer(walk.begin(), walk.begin() + static_cast<long>(p));
            outer.insert(outer.end(), walk.begin() + static_cast<long>(q), walk.end());
            walk = (inner.size() % 2 == 1) ? std::move(inner) : std::move(outer);
            changed = true;
            break;
        }
    }
    return walk;
}

} // namespace detail

struct OddCycleList {
    std::vector<std::vector<int>> cycles; // canonical vertex sequences
    bool truncated = false;               // caps bound the search
};

// Simple odd cycles of a graph on n vertices, canonicalized and
// deduplicated. DFS enumeration is capped by max_len / max_count; on top of
// that, for every vertex the shortest odd closed walk through it (found via
// BFS on the bipartite double cover) is reduced to a simple odd cycle and
// kept regardless of the caps, so the result never misses a certificate in
// a vertex's neighborhood just because the caps bound the search.
inline OddCycleList enumerate_odd_cycles(int n, const std::vector<Edge>& edges, int max_len = 9,
                                         long long max_count = 100000) {
    const auto adj = detail::adjacency(n, edges);
    OddCycleList out;
    std::set<std::vector<int>> found;

    // DFS with the root as the smallest vertex of each cycle; closing edge
    // recorded only when path[1] < path.back() so each cycle appears once.
    std::vector<int> path;
    std::vector<bool> on_path(static_cast<size_t>(n), false);
    long long budget = max_count;

    auto dfs = [&](auto&& self, int root, int u) -> void {
        if (budget <= 0) {
            out.truncated = true;
            return;
        }
        for (int v : adj[static_cast<size_t>(u)]) {
            if (v == root && path.size() >= 3) {
                if (path.size() % 2 == 1 && static_cast<int>(path.size()) <= max_len &&
                    path[1] < path.back()) {
                    auto canon = detail::canonical_cycle(path);
                    if (found.insert(canon).second) {
                        out.cycles.push_back(std::move(canon));
                        if (--budget <= 0) {
                            out.truncated = true;
                            return;
                        }
                    }
                }
            } else if (v > root && !on_path[static_cast<size_t>(v)]) {
                if (static_cast<int>(path.size()) >= max_len) {
                    out.truncated = true;
                    continue;
                }
                path.push_back(v);
                on_path[static_cast<size_t>(v)] = true;
                self(self, root, v);
                on_path[static_cast<size_t>(v)] = false;
                path.pop_back();
            }
        }
    };
    for (int root = 0; root < n && budget > 0; ++root) {
        path = {root};
        on_path.assign(static_cast<size_t>(n), false);
        on_path[static_cast<size_t>(root)] = true;
        dfs(dfs, root, root);
    }

    // Floor: per-vertex shortest odd closed walk via the double cover
    // (vertex (v, p) = v reached on parity p).
    for (int v = 0; v < n; ++v) {
        std::vector<std::array<int, 2>> dist(static_cast<size_t>(n), {-1, -1});
        std::vector<std::array<int, 2>> par(static_cast<size_t>(n), {-1, -1});
        std::queue<std::pair<int, int>> q;
        dist[static_cast<size_t>(v)][0] = 0;
        q.push({v, 0});
        while (!q.empty()) {
            auto [u, p] = q.front();
            q.pop();
            for (int w : adj[static_cast<size_t>(u)]) {
                int np = p ^ 1;
                if (dist[static_cast<size_t>(w)][np] == -1) {
                    dist[static_cast<size_t>(w)][np] = dist[static_cast<size_t>(u)][p] + 1;
                    par[static_cast<size_t>(w)][np] = u;
                    q.push({w, np});
                }
            }
        }
        if (dist[static_cast<size_t>(v)][1] == -1) continue;
        std::vector<int> walk;
        int u = v, p = 1;
        while (!(u == v && p == 0)) {
            walk.push_back(u);
            int pu = par[static_cast<size_t>(u)][p];
            u = pu;
            p ^= 1;
        }
        walk.push_back(v);
        std::reverse(walk.begin(), walk.end()); // closed walk v .. v, odd length
        auto cyc = detail::simplify_odd_walk(std::move(walk));
        auto canon = detail::canonical_cycle(std::move(cyc));
        if (found.insert(canon).second) out.cycles.push_back(std::move(canon));
    }

    if (out.cycles.empty()) throw not_applicable("graph has no odd cycle");
    std::sort(out.cycles.begin(), out.cycles.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

namespace detail {

// BFS distances inside one alignment set (sets are components, so plain BFS
// over the alignment graph stays inside).
inline std::vector<int> alignment_bfs(const GraphBundle& b, int source) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(b.topology.users) + 1);
    for (const auto& [x, y] : b.alignment_edges) {
        adj[static_cast<size_t>(x)].push_back(y);
        adj[static_cast<size_t>(y)].push_back(x);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    std::vector<int> dist(static_cast<size_t>(b.topology.users) + 1, -1);
    std::queue<int> q;
    dist[static_cast<size_t>(source)] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : adj[static_cast<size_t>(u)])
            if (dist[static_cast<size_t>(w)] == -1) {
                dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(u)] + 1;
                q.push(w);
            }
    }
    return dist;
}

// Shortest alignment path, deterministic (ascending-neighbor BFS parents).
inline std::vector<int> alignment_path(const GraphBundle& b, int from, int to) {
    if (from == to) return {};
    std::vector<std::vector<int>> adj(static_cast<size_t>(b.topology.users) + 1);
    for (const auto& [x, y] : b.alignment_edges) {
        adj[static_cast<size_t>(x)].push_back(y);
        adj[static_cast<size_t>(y)].push_back(x);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    std::vector<int> par(static_cast<size_t>(b.topology.users) + 1, 0);
    std::queue<int> q;
    par[static_cast<size_t>(from)] = from;
    q.push(from);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (u == to) break;
        for (int w : adj[static_cast<size_t>(u)])
            if (par[static_cast<size_t>(w)] == 0) {
                par[static_cast<size_t>(w)] = u;
                q.push(w);
            }
    }
    std::vector<int> path;
    for (int u = to; u != from; u = par[static_cast<size_t>(u)]) path.push_back(u);
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return path;
}

// Canonical cyclic message sequence of a completed cycle: lexicographically
// smallest over all rotations and both directions. Used only as the final
// deterministic tie-break.
inline std::vector<int> canonical_message_sequence(const CompletedCycle& c) {
    std::vector<int> seq;
    const int m = static_cast<int>(c.sets.size());
    for (int j = 0; j < m; ++j) {
        if (c.paths[static_cast<size_t>(j)].empty())
            seq.push_back(c.entry_of(j));
        else
            seq.insert(seq.end(), c.paths[static_cast<size_t>(j)].begin(),
                       c.paths[static_cast<size_t>(j)].end());
    }
    std::vector<int> best;
    const size_t n = seq.size();
    for (int dir = 0; dir < 2; ++dir) {
        for (size_t r = 0; r < n; ++r) {
            std::vector<int> cand(n);
            for (size_t i = 0; i < n; ++i) cand[i] = seq[(r + i) % n];
            if (best.empty() || cand < best) best = std::move(cand);
        }
        std::reverse(seq.begin(), seq.end());
    }
    return best;
}

} // namespace detail

// Recompute parameters from the structure. Throws invalid_cycle naming the
// violated clause if the stored params disagree.
inline CycleParams cycle_params(const CompletedCycle& c) {
    const int m = static_cast<int>(c.sets.size());
    if (m < 3 || m % 2 == 0) throw invalid_cycle("m must be odd and >= 3");
    if (static_cast<int>(c.conflict_edges.size()) != m)
        throw invalid_cycle("completed cycle must contain exactly m conflict edges");
    if (static_cast<int>(c.paths.size()) != m)
        throw invalid_cycle("one internal path per set required");
    int m2 = 0, l_sigma = 0, cycle_len = m;
    for (int j = 0; j < m; ++j) {
        const int entry = c.entry_of(j);
        const int exit = c.exit_of(j);
        const auto& path = c.paths[static_cast<size_t>(j)];
        if (entry == exit) {
            if (!path.empty()) throw invalid_cycle("path must be empty when entry == exit");
            ++m2;
            l_sigma += 1;
        } else {
            if (path.size() < 2 || path.front() != entry || path.back() != exit)
                throw invalid_cycle("path endpoints must be entry and exit");
            const int len = static_cast<int>(path.size()) - 1;
            l_sigma += len;
            cycle_len += len;
        }
    }
    CycleParams p(m, m2, l_sigma);
    // Definition check: l_sigma == |C_c| - m + m2
    if (p.l_sigma != cycle_len - m + m2) throw invalid_cycle("l_sigma != |C_c| - m + m2");
    if (!(c.params == CycleParams{}) && !(p == c.params))
        throw invalid_cycle("stored params disagree with structure");
    return p;
}

struct CycleCheck {
    bool ok = true;
    std::vector<std::string> reasons;
    explicit operator bool() const { return ok; }
    void fail(std::string r) {
        ok = false;
        reasons.push_back(std::move(r));
    }
};

// Full structural validation of a completed cycle against a bundle.
inline CycleCheck verify_completed_cycle(const GraphBundle& b, const CompletedCycle& c) {
    CycleCheck chk;
    const int m = static_cast<int>(c.sets.size());
    if (m < 3 || m % 2 == 0) {
        chk.fail("m must be odd and >= 3");
        return chk;
    }
    if (static_cast<int>(c.conflict_edges.size()) != m || static_cast<int>(c.paths.size()) != m) {
        chk.fail("need exactly m conflict edges and m paths");
        return chk;
    }
    std::set<Edge> conflict(b.conflict_edges.begin(), b.conflict_edges.end());
    std::set<Edge> alignment(b.alignment_edges.begin(), b.alignment_edges.end());
    std::set<std::vector<int>> bundle_sets(b.sets.begin(), b.sets.end());

    std::set<std::vector<int>> distinct;
    for (int j = 0; j < m; ++j) {
        const auto& S = c.sets[static_cast<size_t>(j)];
        if (S.size() < 2) chk.fail("set " + std::to_string(j) + " is a singleton");
        if (!bundle_sets.count(S)) chk.fail("set " + std::to_string(j) + " is not an alignment set");
        if (!distinct.insert(S).second) chk.fail("alignment set visited twice");
    }
    auto in_set = [&](int v, int j) {
        const auto& S = c.sets[static_cast<size_t>(j)];
        return std::binary_search(S.begin(), S.end(), v);
    };
    for (int j = 0; j < m; ++j) {
        const auto [exit, entry_next] = c.conflict_edges[static_cast<size_t>(j)];
        if (!conflict.count(make_edge(exit, entry_next)))
            chk.fail("conflict edge " + std::to_string(exit) + "-" + std::to_string(entry_next) +
                     " not in conflict graph");
        if (!in_set(exit, j)) chk.fail("exit of edge " + std::to_string(j) + " outside its set");
        if (!in_set(entry_next, (j + 1) % m))
            chk.fail("entry of edge " + std::to_string(j) + " outside next set");
    }
    for (int j = 0; j < m; ++j) {
        const int entry = c.entry_of(j);
        const int exit = c.exit_of(j);
        const auto& path = c.paths[static_cast<size_t>(j)];
        if (entry == exit) {
            if (!path.empty()) chk.fail("nonempty path with entry == exit in set " + std::to_string(j));
            continue;
        }
        if (path.size() < 2 || path.front() != entry || path.back() != exit) {
            chk.fail("path endpoints wrong in set " + std::to_string(j));
            continue;
        }
        std::set<int> seen;
        for (size_t i = 0; i < path.size(); ++i) {
            if (!in_set(path[i], j)) chk.fail("path leaves set " + std::to_string(j));
            if (!seen.insert(path[i]).second) chk.fail("path revisits a message");
            if (i + 1 < path.size() && !alignment.count(make_edge(path[i], path[i + 1])))
                chk.fail("path uses a non-alignment edge in set " + std::to_string(j));
        }
    }
    if (chk.ok) {
        try {
            auto p = cycle_params(c);
            if (!(p == c.params)) chk.fail("params disagree with structure");
        } catch (const invalid_cycle& e) {
            chk.fail(e.what());
        }
    }
    return chk;
}

// Minimum-objective completed cycle over the supplied odd reduced cycles.
//
// Per cycle the inter-set conflict edges are chosen by dynamic programming
// over (entry, exit) message pairs, with per-set cost 1 when entry == exit
// (the proof's l_i = 1 with an alignment neighbor) and the BFS alignment
// distance otherwise. Shortest intra-set paths suffice: longer paths only
// grow |C_c|. Input cycles are canonicalized first, so the result is
// invariant under rotation/reflection of the caller's cycle ordering; the
// final tie-break is (objective, m, canonical message sequence).
inline CompletedCycle optimize_completed_cycle(const GraphBundle& b,
                                               const std::vector<std::vector<int>>& odd_cycles) {
    if (odd_cycles.empty()) throw not_applicable("no odd cycles supplied");
    constexpr int kInf = std::numeric_limits<int>::max() / 4;

    std::optional<CompletedCycle> best;
    std::vector<int> best_seq;

    for (const auto& raw_cycle : odd_cycles) {
        const auto cyc = detail::canonical_cycle(raw_cycle);
        const int m = static_cast<int>(cyc.size());
        std::vector<const std::vector<int>*> members(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j)
            members[static_cast<size_t>(j)] = &b.reduced_set(cyc[static_cast<size_t>(j)]);

        // conflict pairs between consecutive sets: pairs[j] = (exit in j, entry in j+1)
        std::vector<std::vector<std::pair<int, int>>> pairs(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) {
            for (int x : *members[static_cast<size_t>(j)])
                for (int y : *members[static_cast<size_t>((j + 1) % m)])
                    if (std::binary_search(b.conflict_edges.begin(), b.conflict_edges.end(),
                                           make_edge(x, y)))
                        pairs[static_cast<size_t>(j)].push_back({x, y});
            if (pairs[static_cast<size_t>(j)].empty())
                throw invalid_cycle("reduced cycle edge without a conflict edge");
        }

        // intra-set distances from every message used as an entry/exit
        std::map<int, std::vector<int>> bfs;
        for (int j = 0; j < m; ++j)
            for (int v : *members[static_cast<size_t>(j)])
                if (!bfs.count(v)) bfs[v] = detail::alignment_bfs(b, v);
        auto cost = [&](int entry, int exit) {
            if (entry == exit) return 1;
            return bfs[entry][static_cast<size_t>(exit)];
        };

        // DP over entry_0 choices; state after edge j = entry of set j+1
        const auto& S0 = *members[0];
        for (int entry0 : S0) {
            bool entry0_usable = false;
            for (const auto& [x, y] : pairs[static_cast<size_t>(m - 1)])
                if (y == entry0) entry0_usable = true;
            if (!entry0_usable) continue;

            // f[v] = best cost of sets 0..j with entry_{j+1} = v
            std::map<int, int> f;
            std::map<int, std::pair<int, int>> choice; // entry_{j+1} -> (entry_j, exit_j)
            std::vector<std::map<int, std::pair<int, int>>> trace;

            for (const auto& [x, y] : pairs[0]) {
                const int cst = cost(entry0, x);
                auto it = f.find(y);
                if (it == f.end() || cst < it->second) {
                    f[y] = cst;
                    choice[y] = {entry0, x};
                }
            }
            trace.push_back(choice);

            for (int j = 1; j < m - 1; ++j) {
                std::map<int, int> g;
                std::map<int, std::pair<int, int>> ch;
                for (const auto& [x, y] : pairs[static_cast<size_t>(j)]) {
                    for (const auto& [entry_j, fval] : f) {
                        const int cst = fval + cost(entry_j, x);
                        auto it = g.find(y);
                        if (it == g.end() || cst < it->second) {
                            g[y] = cst;
                            ch[y] = {entry_j, x};
                        }
                    }
                }
                f = std::move(g);
                trace.push_back(ch);
            }

            // close the cycle: edge m-1 must land on entry0
            int total = kInf;
            std::pair<int, int> close_choice{-1, -1};
            for (const auto& [x, y] : pairs[static_cast<size_t>(m - 1)]) {
                if (y != entry0) continue;
                for (const auto& [entry_m1, fval] : f) {
                    const int cst = fval + cost(entry_m1, x);
                    if (cst < total) {
                        total = cst;
                        close_choice = {entry_m1, x};
                    }
                }
            }
            if (total >= kInf) continue;

            // reconstruct entries/exits
            std::vector<int> entry(static_cast<size_t>(m)), exit(static_cast<size_t>(m));
            entry[0] = entry0;
            entry[static_cast<size_t>(m - 1)] = close_choice.first;
            exit[static_cast<size_t>(m - 1)] = close_choice.second;
            int next_entry = close_choice.first;
            for (int j = m - 2; j >= 1; --j) {
                auto [e, x] = trace[static_cast<size_t>(j)].at(next_entry);
                entry[static_cast<size_t>(j)] = e;
                exit[static_cast<size_t>(j)] = x;
                next_entry = e;
            }
            exit[0] = trace[0].at(entry[1]).second;

            CompletedCycle cand;
            for (int j = 0; j < m; ++j) cand.sets.push_back(*members[static_cast<size_t>(j)]);
            for (int j = 0; j < m; ++j)
                cand.conflict_edges.push_back(
                    {exit[static_cast<size_t>(j)], entry[static_cast<size_t>((j + 1) % m)]});
            int m2 = 0, l_sigma = 0;
            for (int j = 0; j < m; ++j) {
                if (entry[static_cast<size_t>(j)] == exit[static_cast<size_t>(j)]) {
                    cand.paths.emplace_back();
                    ++m2;
                    ++l_sigma;
                } else {
                    auto p = detail::alignment_path(b, entry[static_cast<size_t>(j)],
                                                    exit[static_cast<size_t>(j)]);
                    l_sigma += static_cast<int>(p.size()) - 1;
                    cand.paths.push_back(std::move(p));
                }
            }
            cand.params = CycleParams(m, m2, l_sigma);

            auto better = [&]() {
                if (!best) return true;
                if (cand.params.objective != best->params.objective)
                    return cand.params.objective < best->params.objective;
                if (cand.params.m != best->params.m) return cand.params.m < best->params.m;
                auto seq = detail::canonical_message_sequence(cand);
                return seq < best_seq;
            };
            if (better()) {
                best_seq = detail::canonical_message_sequence(cand);
                best = std::move(cand);
            }
        }
    }
    if (!best) throw not_applicable("no completed cycle realizable");
    return *best;
}

} // namespace timdof
