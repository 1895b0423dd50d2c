#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "timdof/rng.hpp"

namespace timdof {

// Syntactically broken input (bad header, junk line, unreadable file).
class parse_error : public std::runtime_error {
  public:
    parse_error(std::string msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(msg)
                                      : std::move(msg)),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// Well-formed text that violates a topology invariant.
class topology_error : public std::runtime_error {
  public:
    enum class kind { missing_direct_link, duplicate_receiver, index_out_of_range, unknown_fixture };

    topology_error(kind k, std::string msg, int user = 0)
        : std::runtime_error(std::move(msg)), kind_(k), user_(user) {}
    kind which() const { return kind_; }
    int user() const { return user_; }

  private:
    kind kind_;
    int user_;
};

// A partially connected K-user interference network. heard[k-1] is the set
// of transmitter indices audible at receiver k, stored sorted ascending and
// always containing k itself (the direct link). The interferer set M_k is
// derived, never stored.
struct NetworkTopology {
    int users = 0;
    std::vector<std::vector<int>> heard;

    const std::vector<int>& heard_of(int k) const { return heard[static_cast<size_t>(k) - 1]; }

    std::vector<int> interferers(int k) const {
        std::vector<int> m;
        for (int l : heard_of(k))
            if (l != k) m.push_back(l);
        return m;
    }

    bool hears(int k, int l) const {
        const auto& h = heard_of(k);
        return std::binary_search(h.begin(), h.end(), l);
    }

    friend bool operator==(const NetworkTopology& a, const NetworkTopology& b) {
        return a.users == b.users && a.heard == b.heard;
    }
};

namespace detail {

inline constexpr int kMaxUsers = 4096;

inline void validate_topology(const NetworkTopology& t) {
    for (int k = 1; k <= t.users; ++k) {
        const auto& h = t.heard_of(k);
        for (int l : h) {
            if (l < 1 || l > t.users)
                throw topology_error(topology_error::kind::index_out_of_range,
                                     "rx " + std::to_string(k) + ": transmitter index " +
                                         std::to_string(l) + " out of range",
                                     k);
        }
        if (!t.hears(k, k))
            throw topology_error(topology_error::kind::missing_direct_link,
                                 "rx " + std::to_string(k) + ": missing direct link", k);
    }
}

} // namespace detail

// Text format: '#' comments, blank lines ignored. First significant line
// `users <K>`, then exactly K lines `rx <k>: <i1> <i2> ...`, each k once,
// order-insensitive.
inline NetworkTopology parse_topology(const std::string& text) {
    NetworkTopology t;
    std::vector<bool> seen;
    bool have_users = false;
    int rx_count = 0;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream line(raw);
        std::string tok;
        if (!(line >> tok)) continue; // blank

        if (!have_users) {
            if (tok != "users") throw parse_error("expected `users <K>`", lineno);
            long long k = 0;
            if (!(line >> k) || k < 1 || k > detail::kMaxUsers)
                throw parse_error("bad user count", lineno);
            if (line >> tok) throw parse_error("trailing tokens after user count", lineno);
            t.users = static_cast<int>(k);
            t.heard.resize(static_cast<size_t>(t.users));
            seen.assign(static_cast<size_t>(t.users) + 1, false);
            have_users = true;
            continue;
        }

        if (tok != "rx") throw parse_error("expected `rx <k>: ...`", lineno);
        if (rx_count == t.users) throw parse_error("more rx lines than users", lineno);
        std::string head;
        if (!(line >> head)) throw parse_error("missing receiver index", lineno);
        if (head.empty() || head.back() != ':') {
            // allow `rx 3 :` as well as `rx 3:`
            std::string colon;
            if (!(line >> colon) || colon != ":")
                throw parse_error("expected `:` after receiver index", lineno);
        } else {
            head.pop_back();
        }
        long long k = 0;
        try {
            size_t pos = 0;
            k = std::stoll(head, &pos);
            if (pos != head.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw parse_error("bad receiver index `" + head + "`", lineno);
        }
        if (k < 1 || k > t.users)
            throw topology_error(topology_error::kind::index_out_of_range,
                                 "rx index " + std::to_string(k) + " out of range",
                                 static_cast<int>(k));
        if (seen[static_cast<size_t>(k)])
            throw topology_error(topology_error::kind::duplicate_receiver,
                                 "duplicate rx line for receiver " + std::to_string(k),
                                 static_cast<int>(k));
        seen[static_cast<size_t>(k)] = true;

        std::set<int> ids;
        std::string id_tok;
        while (line >> id_tok) {
            long long v = 0;
            try {
                size_t pos = 0;
                v = std::stoll(id_tok, &pos);
                if (pos != id_tok.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw parse_error("bad transmitter index `" + id_tok + "`", lineno);
            }
            ids.insert(static_cast<int>(v));
        }
        t.heard[static_cast<size_t>(k - 1)].assign(ids.begin(), ids.end());
        ++rx_count;
    }

    if (!have_users) throw parse_error("empty input: no `users` line");
    if (rx_count != t.users)
        throw parse_error("expected " + std::to_string(t.users) + " rx lines, got " +
                          std::to_string(rx_count));
    detail::validate_topology(t);
    return t;
}

// Canonical emission: own index first, then interferers ascending.
// parse(emit(t)) == t for every valid topology.
inline std::string emit_topology(const NetworkTopology& t) {
    std::string out = "users " + std::to_string(t.users) + "\n";
    for (int k = 1; k <= t.users; ++k) {
        out += "rx " + std::to_string(k) + ": " + std::to_string(k);
        for (int l : t.heard_of(k))
            if (l != k) out += " " + std::to_string(l);
        out += "\n";
    }
    return out;
}

// Fixture corpus. These reconstruct the structural parameters of the
// networks analyzed in the literature (triangle reduced graph with
// m=3, l_sigma=3; an even-cycle counterpart; a minimal internal-conflict
// case); they are validated by the exhaustive definition oracle in the
// test suite.
inline const std::vector<std::pair<std::string, std::string>>& fixture_corpus() {
    static const std::vector<std::pair<std::string, std::string>> corpus = {
        {"hexnet6",
         "users 6\nrx 1: 1 5 6\nrx 2: 2\nrx 3: 3 1 2\nrx 4: 4\nrx 5: 5 3 4\nrx 6: 6\n"},
        {"paper7",
         "users 7\nrx 1: 1 3 5\nrx 2: 2 5 6\nrx 3: 3 4 7\nrx 4: 4 2\nrx 5: 5\nrx 6: 6 1 2\n"
         "rx 7: 7\n"},
        {"square8",
         "users 8\nrx 1: 1 7 8\nrx 2: 2\nrx 3: 3 1 2\nrx 4: 4\nrx 5: 5 3 4\nrx 6: 6\n"
         "rx 7: 7 5 6\nrx 8: 8\n"},
        {"iconflict3", "users 3\nrx 1: 1 2\nrx 2: 2\nrx 3: 3 1 2\n"},
    };
    return corpus;
}

inline std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : fixture_corpus()) names.push_back(name);
    return names;
}

inline const std::string& fixture_text(const std::string& name) {
    for (const auto& [n, text] : fixture_corpus())
        if (n == name) return text;
    throw topology_error(topology_error::kind::unknown_fixture, "unknown fixture `" + name + "`");
}

inline NetworkTopology load_fixture(const std::string& name) {
    return parse_topology(fixture_text(name));
}

// Random valid topology with 1..max_users users; used by property tests
// and the definition-oracle sweeps.
inline NetworkTopology random_topology(SplitMix64& rng, int max_users, double link_prob = 0.35) {
    NetworkTopology t;
    t.users = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_users)));
    t.heard.resize(static_cast<size_t>(t.users));
    for (int k = 1; k <= t.users; ++k) {
        std::set<int> ids = {k};
        for (int l = 1; l <= t.users; ++l)
            if (l != k && rng.next_double() < link_prob) ids.insert(l);
        t.heard[static_cast<size_t>(k - 1)].assign(ids.begin(), ids.end());
    }
    return t;
}

} // namespace timdof
