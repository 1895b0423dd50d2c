#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "timdof/channel.hpp"
#include "timdof/rng.hpp"
#include "timdof/scheme.hpp"
#include "timdof/topology.hpp"

namespace timdof {

class sim_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Deterministic floor-channel experiment configuration. pbar is the integer
// input ceiling (the square root of the nominal SNR); the private alphabet
// is {0..floor(pbar/2)} and commons ride multiples of the spacing M.
struct SimConfig {
    long long pbar = 1000;
    int qc = 4;               // common alphabet size
    std::uint64_t trials = 500;
    std::uint64_t seed = 1;
    int threads = 1;
    double delta_c = 1.0;     // common-level backoff in (0, 1]
    ChannelModel model{};

    // awgn mode
    bool awgn = false;
    double snr_db = 30.0;
    int awgn_alphabet = 16;   // private PAM order in awgn mode

    long long qp() const { return pbar / 2 + 1; }
    long long common_spacing() const {
        const long long scaled =
            delta_c == 1.0 ? qp() : static_cast<long long>(std::floor(static_cast<double>(qp()) * delta_c));
        return scaled / qc;
    }

    void validate() const {
        if (pbar < 1) throw sim_error("pbar must be >= 1");
        if (qc < 1) throw sim_error("qc must be >= 1");
        if (trials < 1) throw sim_error("trials must be >= 1");
        if (threads < 1) throw sim_error("threads must be >= 1");
        if (!(delta_c > 0.0) || delta_c > 1.0) throw sim_error("delta_c must be in (0, 1]");
        if (common_spacing() < 1) throw sim_error("common spacing M must be >= 1 (raise pbar or lower qc)");
        if (awgn && awgn_alphabet < 2) throw sim_error("awgn alphabet must be >= 2");
        model.validate();
    }
};

// One block of channel coefficients: g[k-1][i][t] pairs receiver k with the
// i-th entry of heard(k) at use t. Every (k, l, t) triple is an independent
// draw; transmitters never see this table.
struct ChannelTable {
    std::vector<std::vector<std::vector<double>>> g;
};

inline ChannelTable draw_channels(const ChannelModel& model, const NetworkTopology& t, int uses,
                                  SplitMix64& rng) {
    ChannelTable tab;
    tab.g.resize(static_cast<size_t>(t.users));
    for (int k = 1; k <= t.users; ++k) {
        const auto& heard = t.heard_of(k);
        auto& row = tab.g[static_cast<size_t>(k - 1)];
        row.resize(heard.size());
        for (size_t i = 0; i < heard.size(); ++i) {
            row[i].resize(static_cast<size_t>(uses));
            for (int u = 0; u < uses; ++u) row[i][static_cast<size_t>(u)] = model.draw(rng);
        }
    }
    return tab;
}

// floor-sum output: sum over heard transmitters of floor(g * x).
inline long long deterministic_output(std::span<const double> g_row,
                                      std::span<const long long> symbols, long long pbar) {
    if (g_row.size() != symbols.size()) throw sim_error("coefficient/symbol arity mismatch");
    long long y = 0;
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] < 0 || symbols[i] > pbar)
            throw sim_error("symbol out of range [0, pbar]");
        y += static_cast<long long>(std::floor(g_row[i] * static_cast<double>(symbols[i])));
    }
    return y;
}

// Integer encoder: symbols[user][slot]. Takes messages only -- no channel
// realizations enter here, which is the whole finite-precision-CSIT point.
// Non-private slots carry c*M (zero if commons are off); the private slot
// adds the private symbol on top.
inline std::vector<std::vector<long long>> encode_block(const TransmissionScheme& s,
                                                        const SimConfig& cfg,
                                                        std::span<const int> commons,
                                                        std::span<const long long> privates) {
    const long long M = cfg.common_spacing();
    std::vector<std::vector<long long>> x(static_cast<size_t>(s.users),
                                          std::vector<long long>(static_cast<size_t>(s.slots), 0));
    for (int k = 1; k <= s.users; ++k) {
        const long long base =
            s.common_active ? static_cast<long long>(commons[static_cast<size_t>(k - 1)]) * M : 0;
        for (int slot = 1; slot <= s.slots; ++slot) {
            long long v = s.common_active ? base : 0;
            if (slot == s.private_slot[static_cast<size_t>(k - 1)])
                v += privates[static_cast<size_t>(k - 1)];
            x[static_cast<size_t>(k - 1)][static_cast<size_t>(slot - 1)] = v;
        }
    }
    return x;
}

struct TrialSummary {
    std::uint64_t trials = 0;
    int users = 0;
    std::uint64_t rx_total = 0;
    std::uint64_t rx_failed = 0;
    std::uint64_t rx_fail_mac = 0;     // ambiguous or wrong common tuple
    std::uint64_t rx_fail_private = 0; // commons fine, private wrong
    std::uint64_t failed_trials = 0;   // trials with any receiver failure

    double err_rate_total = 0.0;
    double err_mac = 0.0;
    double err_private = 0.0;
    double rate_ratio_mean = 0.0;
    double nominal_rate_ratio = 0.0;
};

namespace detail {

// Free slot of receiver k: the lowest slot not used by any heard private.
inline int free_slot_of(const TransmissionScheme& s, const NetworkTopology& t, int k) {
    std::set<int> used;
    for (int l : t.heard_of(k)) used.insert(s.private_slot[static_cast<size_t>(l - 1)]);
    for (int slot = 1; slot <= s.slots; ++slot)
        if (!used.count(slot)) return slot;
    return 0;
}

struct Counters {
    std::uint64_t rx_failed = 0, rx_fail_mac = 0, rx_fail_private = 0, failed_trials = 0;
    void operator+=(const Counters& o) {
        rx_failed += o.rx_failed;
        rx_fail_mac += o.rx_fail_mac;
        rx_fail_private += o.rx_fail_private;
        failed_trials += o.failed_trials;
    }
};

inline void run_deterministic_trial(const TransmissionScheme& s, const NetworkTopology& t,
                                    const SimConfig& cfg, std::uint64_t trial, Counters& out) {
    SplitMix64 rng(substream_seed(cfg.seed, trial));
    const long long M = cfg.common_spacing();
    const long long Qp = cfg.qp();

    std::vector<int> commons(static_cast<size_t>(t.users), 0);
    std::vector<long long> privates(static_cast<size_t>(t.users), 0);
    for (int k = 0; k < t.users; ++k) {
        if (s.common_active)
            commons[static_cast<size_t>(k)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.qc)));
        privates[static_cast<size_t>(k)] =
            static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(Qp)));
    }
    const auto x = encode_block(s, cfg, commons, privates);
    const auto chan = draw_channels(cfg.model, t, s.slots, rng);

    bool any_fail = false;
    for (int k = 1; k <= t.users; ++k) {
        const auto& heard = t.heard_of(k);
        const auto& grow = chan.g[static_cast<size_t>(k - 1)];
        auto received = [&](int slot) {
            long long y = 0;
            for (size_t i = 0; i < heard.size(); ++i)
                y += static_cast<long long>(
                    std::floor(grow[i][static_cast<size_t>(slot - 1)] *
                               static_cast<double>(x[static_cast<size_t>(heard[i] - 1)][static_cast<size_t>(slot - 1)])));
            return y;
        };

        bool mac_bad = false;
        std::vector<int> decoded_commons(heard.size(), 0);
        if (s.common_active) {
            const int f = free_slot_of(s, t, k);
            if (f == 0) {
                mac_bad = true;
            } else {
                const long long y = received(f);
                // exhaustive search over heard-common tuples
                std::vector<int> tuple(heard.size(), 0);
                int matches = 0;
                std::vector<int> first(heard.size(), 0);
                for (;;) {
                    long long v = 0;
                    for (size_t i = 0; i < heard.size(); ++i)
                        v += static_cast<long long>(
                            std::floor(grow[i][static_cast<size_t>(f - 1)] *
                                       static_cast<double>(static_cast<long long>(tuple[i]) * M)));
                    if (v == y) {
                        if (++matches == 1) first = tuple;
                        if (matches >= 2) break; // ambiguous, stop early
                    }
                    size_t pos = 0;
                    while (pos < heard.size() && ++tuple[pos] == cfg.qc) tuple[pos++] = 0;
                    if (pos == heard.size()) break;
                }
                if (matches != 1)
                    mac_bad = true;
                else
                    decoded_commons = first;
            }
        }

        bool priv_bad = false;
        if (!mac_bad) {
            const int slot = s.private_slot[static_cast<size_t>(k - 1)];
            long long resid = received(slot);
            double g_own = 0.0;
            long long own_base = 0;
            for (size_t i = 0; i < heard.size(); ++i) {
                const int l = heard[i];
                const double g = grow[i][static_cast<size_t>(slot - 1)];
                const long long base =
                    s.common_active ? static_cast<long long>(decoded_commons[i]) * M : 0;
                if (l == k) {
                    g_own = g;
                    own_base = base;
                } else {
                    // every other heard transmitter sends only its common here
                    resid -= static_cast<long long>(std::floor(g * static_cast<double>(base)));
                }
            }
            // invert p -> floor(g_own * (p + own_base)), strictly increasing
            long long lo = 0, hi = Qp - 1, found = -1;
            while (lo <= hi) {
                const long long mid = lo + (hi - lo) / 2;
                const long long v = static_cast<long long>(
                    std::floor(g_own * static_cast<double>(mid + own_base)));
                if (v == resid) {
                    found = mid;
                    break;
                }
                if (v < resid)
                    lo = mid + 1;
                else
                    hi = mid - 1;
            }
            priv_bad = (found != privates[static_cast<size_t>(k - 1)]);
        }

        if (mac_bad) {
            ++out.rx_failed;
            ++out.rx_fail_mac;
            any_fail = true;
        } else if (priv_bad) {
            ++out.rx_failed;
            ++out.rx_fail_private;
            any_fail = true;
        }
    }
    if (any_fail) ++out.failed_trials;
}

inline void run_awgn_trial(const TransmissionScheme& s, const NetworkTopology& t,
                           const SimConfig& cfg, std::uint64_t trial, Counters& out) {
    SplitMix64 rng(substream_seed(cfg.seed, trial));
    const double sqrtP = std::pow(10.0, cfg.snr_db / 20.0);

    // PAM levels at the given power (equally likely symmetric points)
    auto pam = [](int order, double power) {
        std::vector<double> lv(static_cast<size_t>(order));
        double e = 0.0;
        for (int i = 0; i < order; ++i) {
            lv[static_cast<size_t>(i)] = 2.0 * i - (order - 1);
            e += lv[static_cast<size_t>(i)] * lv[static_cast<size_t>(i)];
        }
        const double scale = std::sqrt(power * order / e);
        for (auto& v : lv) v *= scale;
        return lv;
    };
    const auto priv_lv = pam(cfg.awgn_alphabet, 0.5);
    const auto comm_lv = pam(cfg.qc, 0.5);

    std::vector<int> commons(static_cast<size_t>(t.users), 0);
    std::vector<int> privates(static_cast<size_t>(t.users), 0);
    for (int k = 0; k < t.users; ++k) {
        if (s.common_active)
            commons[static_cast<size_t>(k)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.qc)));
        privates[static_cast<size_t>(k)] =
            static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.awgn_alphabet)));
    }
    // continuous symbols per user/slot
    std::vector<std::vector<double>> x(static_cast<size_t>(t.users),
                                       std::vector<double>(static_cast<size_t>(s.slots), 0.0));
    for (int k = 1; k <= t.users; ++k) {
        for (int slot = 1; slot <= s.slots; ++slot) {
            double v = s.common_active ? comm_lv[static_cast<size_t>(commons[static_cast<size_t>(k - 1)])] : 0.0;
            if (slot == s.private_slot[static_cast<size_t>(k - 1)])
                v += priv_lv[static_cast<size_t>(privates[static_cast<size_t>(k - 1)])];
            x[static_cast<size_t>(k - 1)][static_cast<size_t>(slot - 1)] = v;
        }
    }
    const auto chan = draw_channels(cfg.model, t, s.slots, rng);

    bool any_fail = false;
    for (int k = 1; k <= t.users; ++k) {
        const auto& heard = t.heard_of(k);
        const auto& grow = chan.g[static_cast<size_t>(k - 1)];
        auto received = [&](int slot) {
            double y = 0.0;
            for (size_t i = 0; i < heard.size(); ++i)
                y += grow[i][static_cast<size_t>(slot - 1)] *
                     x[static_cast<size_t>(heard[i] - 1)][static_cast<size_t>(slot - 1)];
            return sqrtP * y + rng.next_gaussian();
        };

        bool mac_bad = false;
        std::vector<int> decoded_commons(heard.size(), 0);
        if (s.common_active) {
            const int f = free_slot_of(s, t, k);
            const double y = received(f);
            double best = 0.0;
            bool have = false;
            std::vector<int> tuple(heard.size(), 0);
            for (;;) {
                double v = 0.0;
                for (size_t i = 0; i < heard.size(); ++i)
                    v += grow[i][static_cast<size_t>(f - 1)] * comm_lv[static_cast<size_t>(tuple[i])];
                const double d = std::abs(y - sqrtP * v);
                if (!have || d < best) {
                    best = d;
                    decoded_commons = tuple;
                    have = true;
                }
                size_t pos = 0;
                while (pos < heard.size() && ++tuple[pos] == cfg.qc) tuple[pos++] = 0;
                if (pos == heard.size()) break;
            }
            for (size_t i = 0; i < heard.size(); ++i)
                if (heard[i] == k && decoded_commons[i] != commons[static_cast<size_t>(k - 1)])
                    mac_bad = true;
        }

        // private: subtract decoded commons, nearest PAM point on the residue
        const int slot = s.private_slot[static_cast<size_t>(k - 1)];
        double resid = received(slot);
        double g_own = 0.0;
        for (size_t i = 0; i < heard.size(); ++i) {
            const double g = grow[i][static_cast<size_t>(slot - 1)];
            if (s.common_active)
                resid -= sqrtP * g * comm_lv[static_cast<size_t>(decoded_commons[i])];
            if (heard[i] == k) g_own = g;
        }
        int best_p = 0;
        double best_d = 0.0;
        for (int p = 0; p < cfg.awgn_alphabet; ++p) {
            const double d = std::abs(resid - sqrtP * g_own * priv_lv[static_cast<size_t>(p)]);
            if (p == 0 || d < best_d) {
                best_d = d;
                best_p = p;
            }
        }
        const bool priv_bad = best_p != privates[static_cast<size_t>(k - 1)];

        if (mac_bad) {
            ++out.rx_failed;
            ++out.rx_fail_mac;
            any_fail = true;
        } else if (priv_bad) {
            ++out.rx_failed;
            ++out.rx_fail_private;
            any_fail = true;
        }
    }
    if (any_fail) ++out.failed_trials;
}

template <typename TrialFn>
inline TrialSummary run_trials(const TransmissionScheme& s, const NetworkTopology& t,
                               const SimConfig& cfg, double nominal_ratio, TrialFn&& fn) {
    cfg.validate();
    auto v = validate_scheme_structure(s, t); // throws on mismatch
    if (!v.pass) throw sim_error("scheme fails structural validation for this topology");

    const int nthreads = std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.threads), cfg.trials);
    std::vector<Counters> partial(static_cast<size_t>(nthreads));
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w]() {
            Counters local;
            for (std::uint64_t i = static_cast<std::uint64_t>(w); i < cfg.trials;
                 i += static_cast<std::uint64_t>(nthreads))
                fn(s, t, cfg, i, local);
            partial[static_cast<size_t>(w)] = local;
        });
    }
    for (auto& th : pool) th.join();
    Counters total;
    for (const auto& c : partial) total += c;

    TrialSummary sum;
    sum.trials = cfg.trials;
    sum.users = t.users;
    sum.rx_total = cfg.trials * static_cast<std::uint64_t>(t.users);
    sum.rx_failed = total.rx_failed;
    sum.rx_fail_mac = total.rx_fail_mac;
    sum.rx_fail_private = total.rx_fail_private;
    sum.failed_trials = total.failed_trials;
    sum.err_rate_total = static_cast<double>(sum.rx_failed) / static_cast<double>(sum.rx_total);
    sum.err_mac = static_cast<double>(sum.rx_fail_mac) / static_cast<double>(sum.rx_total);
    sum.err_private = static_cast<double>(sum.rx_fail_private) / static_cast<double>(sum.rx_total);
    sum.nominal_rate_ratio = nominal_ratio;
    // delivered rate: a trial's block counts only when every receiver decodes
    sum.rate_ratio_mean = nominal_ratio *
                          (static_cast<double>(cfg.trials - sum.failed_trials) /
                           static_cast<double>(cfg.trials));
    return sum;
}

} // namespace detail

// Empirical DoF ratio of the integer scheme: nats delivered per channel use
// over ln(pbar), the deterministic-model stand-in for (1/2) log P.
inline double nominal_rate_ratio(const TransmissionScheme& s, const SimConfig& cfg) {
    const double lp = std::log(static_cast<double>(cfg.pbar));
    double nats = std::log(static_cast<double>(cfg.qp()));
    if (s.common_active) nats += std::log(static_cast<double>(cfg.qc));
    return nats / (static_cast<double>(s.slots) * lp);
}

inline TrialSummary run_deterministic_trials(const TransmissionScheme& s, const NetworkTopology& t,
                                             const SimConfig& cfg) {
    return detail::run_trials(s, t, cfg, nominal_rate_ratio(s, cfg),
                              [](const TransmissionScheme& sc, const NetworkTopology& tp,
                                 const SimConfig& c, std::uint64_t i, detail::Counters& o) {
                                  detail::run_deterministic_trial(sc, tp, c, i, o);
                              });
}

inline TrialSummary run_awgn_trials(const TransmissionScheme& s, const NetworkTopology& t,
                                    const SimConfig& cfg) {
    return detail::run_trials(s, t, cfg, nominal_rate_ratio(s, cfg),
                              [](const TransmissionScheme& sc, const NetworkTopology& tp,
                                 const SimConfig& c, std::uint64_t i, detail::Counters& o) {
                                  detail::run_awgn_trial(sc, tp, c, i, o);
                              });
}

} // namespace timdof
