#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "timdof/channel.hpp"
#include "timdof/rng.hpp"

namespace timdof {

class ais_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class instance_too_large : public ais_error {
  public:
    using ais_error::ais_error;
};

inline long long eval_floor_form(std::span<const double> coeffs, std::span<const long long> symbols) {
    if (coeffs.size() != symbols.size()) throw ais_error("floor form arity mismatch");
    long long v = 0;
    for (size_t i = 0; i < coeffs.size(); ++i)
        v += static_cast<long long>(std::floor(coeffs[i] * static_cast<double>(symbols[i])));
    return v;
}

// A single-letter aligned-image-set experiment around an odd cycle of m
// sets. Each set i contributes two codeword symbols x_{i,0}, x_{i,1}; the
// alignment form pairs them with two bounded-density coefficients, while
// conflict form i combines set i's exit symbol (x_{i,0} when the cycle
// enters and leaves the set at the same message, x_{i,1} otherwise) with
// set i+1's entry symbol x_{i+1,0} under fixed coefficients h. psi maps
// every conflict-output value to one codeword preimage; the machinery being
// verified holds for any such right inverse.
struct AisInstance {
    enum class PsiMode { lex_min, random };

    int m = 3;
    int pbar = 3;
    ChannelModel model{};
    std::vector<std::array<double, 2>> h;   // per conflict form
    std::vector<std::uint8_t> entry_equals_exit;

    // flattened tables: support_flat is m ints per entry (sorted by packed
    // key), psi_flat the chosen 2m-symbol preimage of each entry
    std::vector<int> support_flat;
    std::vector<int> psi_flat;
    std::unordered_map<std::uint64_t, std::int32_t> index;

    int support_size() const { return static_cast<int>(support_flat.size()) / m; }

    std::span<const int> support_at(int i) const {
        return {support_flat.data() + static_cast<size_t>(i) * static_cast<size_t>(m),
                static_cast<size_t>(m)};
    }
    std::span<const int> psi_at(int i) const {
        return {psi_flat.data() + static_cast<size_t>(i) * 2 * static_cast<size_t>(m),
                2 * static_cast<size_t>(m)};
    }

    static std::uint64_t pack_key(std::span<const int> z) {
        std::uint64_t key = 0;
        for (size_t i = 0; i < z.size(); ++i) {
            const long long shifted = static_cast<long long>(z[i]) + 512;
            if (shifted < 0 || shifted >= 1024) throw ais_error("conflict value out of packable range");
            key = key * 1024 + static_cast<std::uint64_t>(shifted);
        }
        return key;
    }

    int find(std::span<const int> z) const {
        auto it = index.find(pack_key(z));
        if (it == index.end()) throw ais_error("value not in the conflict-output support");
        return it->second;
    }

    int conflict_symbol_a(int i) const { return 2 * i + (entry_equals_exit[static_cast<size_t>(i)] ? 0 : 1); }
    int conflict_symbol_b(int i) const { return 2 * ((i + 1) % m); }

    void conflict_values(std::span<const int> codeword, std::span<int> out) const {
        for (int i = 0; i < m; ++i) {
            const double ha = h[static_cast<size_t>(i)][0];
            const double hb = h[static_cast<size_t>(i)][1];
            out[static_cast<size_t>(i)] =
                static_cast<int>(std::floor(ha * codeword[static_cast<size_t>(conflict_symbol_a(i))]) +
                                 std::floor(hb * codeword[static_cast<size_t>(conflict_symbol_b(i))]));
        }
    }

    // alignment outputs under a realization g (2m coefficients)
    void alignment_values(std::span<const int> codeword, std::span<const double> g,
                          std::span<long long> out) const {
        for (int i = 0; i < m; ++i) {
            out[static_cast<size_t>(i)] =
                static_cast<long long>(std::floor(g[static_cast<size_t>(2 * i)] * codeword[static_cast<size_t>(2 * i)])) +
                static_cast<long long>(std::floor(g[static_cast<size_t>(2 * i + 1)] * codeword[static_cast<size_t>(2 * i + 1)]));
        }
    }

    std::vector<double> draw_g(SplitMix64& rng) const {
        std::vector<double> g(2 * static_cast<size_t>(m));
        for (auto& v : g) v = model.draw(rng);
        return g;
    }

    static AisInstance build(int m, int pbar, std::vector<std::array<double, 2>> h,
                             std::vector<std::uint8_t> entry_equals_exit, ChannelModel model = {},
                             PsiMode psi_mode = PsiMode::lex_min, std::uint64_t psi_seed = 0) {
        if (m < 3 || m % 2 == 0) throw ais_error("m must be odd and >= 3");
        if (pbar < 0) throw ais_error("pbar must be >= 0");
        if (static_cast<int>(h.size()) != m || static_cast<int>(entry_equals_exit.size()) != m)
            throw ais_error("need one (h, entry flag) per conflict form");
        for (const auto& hv : h)
            if (std::abs(hv[0]) > model.delta2 || std::abs(hv[1]) > model.delta2)
                throw ais_error("|h| must not exceed delta2");

        const int dims = 2 * m;
        double tuples = 1.0;
        for (int i = 0; i < dims; ++i) tuples *= static_cast<double>(pbar + 1);
        if (tuples > 4e7)
            throw instance_too_large("codeword space too large for exact enumeration");

        AisInstance inst;
        inst.m = m;
        inst.pbar = pbar;
        inst.model = model;
        inst.h = std::move(h);
        inst.entry_equals_exit = std::move(entry_equals_exit);

        // enumerate the full codeword box in lexicographic order; the first
        // preimage of each conflict value is the lex-min one
        SplitMix64 psi_rng(psi_seed);
        std::map<std::uint64_t, std::pair<std::vector<int>, std::uint64_t>> chosen;
        std::vector<int> x(static_cast<size_t>(dims), 0);
        std::vector<int> z(static_cast<size_t>(m), 0);
        for (;;) {
            inst.conflict_values(x, z);
            const std::uint64_t key = pack_key(z);
            auto [it, inserted] = chosen.try_emplace(key, std::make_pair(x, std::uint64_t{1}));
            if (!inserted && psi_mode == PsiMode::random) {
                // reservoir choice among preimages, uniform
                const std::uint64_t n = ++it->second.second;
                if (psi_rng.next_below(n) == 0) it->second.first = x;
            }
            int pos = dims - 1;
            while (pos >= 0 && x[static_cast<size_t>(pos)] == pbar) x[static_cast<size_t>(pos--)] = 0;
            if (pos < 0) break;
            ++x[static_cast<size_t>(pos)];
        }

        inst.support_flat.reserve(chosen.size() * static_cast<size_t>(m));
        inst.psi_flat.reserve(chosen.size() * static_cast<size_t>(dims));
        inst.index.reserve(chosen.size() * 2);
        std::int32_t idx = 0;
        for (const auto& [key, entry] : chosen) {
            std::uint64_t k = key;
            std::array<int, 8> unpacked{};
            for (int i = m - 1; i >= 0; --i) {
                unpacked[static_cast<size_t>(i)] = static_cast<int>(k % 1024) - 512;
                k /= 1024;
            }
            for (int i = 0; i < m; ++i) inst.support_flat.push_back(unpacked[static_cast<size_t>(i)]);
            for (int v : entry.first) inst.psi_flat.push_back(v);
            inst.index.emplace(key, idx++);
        }
        return inst;
    }
};

// Deterministic "arbitrary" conflict coefficients: magnitudes in
// [0.5, delta2], random signs.
inline std::vector<std::array<double, 2>> default_conflict_coeffs(int m, const ChannelModel& model,
                                                                  std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::array<double, 2>> h(static_cast<size_t>(m));
    for (auto& hv : h)
        for (auto& c : hv) {
            const double mag = 0.5 + (model.delta2 - 0.5) * rng.next_double();
            c = rng.next_below(2) == 0 ? mag : -mag;
        }
    return h;
}

// S(nu, g): every support value whose psi-codeword produces the same
// alignment outputs as nu's under g. Exact enumeration.
inline std::vector<std::vector<int>> aligned_image_set(const AisInstance& inst,
                                                       std::span<const int> nu,
                                                       std::span<const double> g) {
    const int nu_idx = inst.find(nu);
    std::vector<long long> ref(static_cast<size_t>(inst.m));
    inst.alignment_values(inst.psi_at(nu_idx), g, ref);
    std::vector<long long> cur(static_cast<size_t>(inst.m));
    std::vector<std::vector<int>> out;
    for (int i = 0; i < inst.support_size(); ++i) {
        inst.alignment_values(inst.psi_at(i), g, cur);
        if (cur == ref) {
            auto zs = inst.support_at(i);
            out.emplace_back(zs.begin(), zs.end());
        }
    }
    return out;
}

struct IntervalCheck {
    double extent = 0.0;   // length of the smallest interval containing the aligned g's
    double bound = 0.0;    // 4 / |a - a'|
    long long worst_diff = 0; // partner-difference value attaining the extent
    bool vacuous = false;  // bound covers the whole support
};

// Interval confinement: conditioned on the partner term's floor difference
// taking a fixed value, the g's for which floor(g a) - floor(g a') equals it
// sit inside an interval of length at most 4/|a - a'|. Scans a grid over
// the support; with fixed_diff unset, reports the worst difference value.
inline IntervalCheck check_alignment_interval(int a, int a_prime, const ChannelModel& model,
                                              double step = 1e-6,
                                              std::optional<long long> fixed_diff = std::nullopt) {
    if (a == a_prime) throw ais_error("interval confinement needs a != a'");
    IntervalCheck res;
    res.bound = 4.0 / std::abs(static_cast<double>(a) - static_cast<double>(a_prime));
    if (res.bound >= model.delta2 - model.delta1) res.vacuous = true;

    std::map<long long, std::pair<double, double>> span_of; // diff -> (min g, max g)
    const long long steps = static_cast<long long>(std::ceil((model.delta2 - model.delta1) / step));
    for (long long i = 0; i <= steps; ++i) {
        const double g = std::min(model.delta1 + static_cast<double>(i) * step, model.delta2);
        const long long d = static_cast<long long>(std::floor(g * a)) -
                            static_cast<long long>(std::floor(g * a_prime));
        if (fixed_diff && d != *fixed_diff) continue;
        auto [it, inserted] = span_of.try_emplace(d, std::make_pair(g, g));
        if (!inserted) {
            it->second.first = std::min(it->second.first, g);
            it->second.second = std::max(it->second.second, g);
        }
    }
    for (const auto& [d, mm] : span_of) {
        const double ext = mm.second - mm.first;
        if (ext >= res.extent) {
            res.extent = ext;
            res.worst_diff = d;
        }
    }
    return res;
}

namespace detail {

inline double pbar_eff(int pbar) { return static_cast<double>(pbar < 1 ? 1 : pbar); }

} // namespace detail

// P(lambda in S(nu, G)) <= pbar^{(m-1)/2} (8 delta2 fmax)^m
//                          prod_{|lambda_i - nu_i| > 2} 1/(|lambda_i - nu_i| - 2)
inline double alignment_probability_bound(const AisInstance& inst, std::span<const int> nu,
                                          std::span<const int> lambda) {
    double bound = std::pow(detail::pbar_eff(inst.pbar), (inst.m - 1) / 2.0) *
                   std::pow(8.0 * inst.model.delta2 * inst.model.f_max(), inst.m);
    for (int i = 0; i < inst.m; ++i) {
        const double d = std::abs(static_cast<double>(lambda[static_cast<size_t>(i)]) -
                                  static_cast<double>(nu[static_cast<size_t>(i)]));
        if (d > 2.0) bound /= (d - 2.0);
    }
    return bound;
}

struct ProbabilityEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
};

inline ProbabilityEstimate estimate_alignment_probability(const AisInstance& inst,
                                                          std::span<const int> nu,
                                                          std::span<const int> lambda,
                                                          int samples, std::uint64_t seed) {
    const int nu_idx = inst.find(nu);
    const int la_idx = inst.find(lambda);
    std::vector<long long> a(static_cast<size_t>(inst.m)), b(static_cast<size_t>(inst.m));
    long long hits = 0;
    for (int s = 0; s < samples; ++s) {
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
        const auto g = inst.draw_g(rng);
        inst.alignment_values(inst.psi_at(nu_idx), g, a);
        inst.alignment_values(inst.psi_at(la_idx), g, b);
        if (a == b) ++hits;
    }
    ProbabilityEstimate r;
    r.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    r.stderr_ = std::sqrt(std::max(r.estimate * (1.0 - r.estimate), 1e-12) /
                          static_cast<double>(samples));
    r.bound = alignment_probability_bound(inst, nu, lambda);
    return r;
}

// E_G |S(nu, G)| <= pbar^{(m-1)/2} (8 delta2 fmax)^m (7 + 2 ln Hhat)^m,
// Hhat = 3 + floor(2 delta2 pbar). Natural logarithm: the harmonic-sum step
// behind the factor is a natural-log fact.
inline double image_size_bound(const AisInstance& inst) {
    const double hhat = 3.0 + std::floor(2.0 * inst.model.delta2 * static_cast<double>(inst.pbar));
    return std::pow(detail::pbar_eff(inst.pbar), (inst.m - 1) / 2.0) *
           std::pow(8.0 * inst.model.delta2 * inst.model.f_max(), inst.m) *
           std::pow(7.0 + 2.0 * std::log(hhat), inst.m);
}

struct ImageSetResult {
    std::vector<int> nu;
    int samples = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double bound = 0.0;
    std::uint32_t min_size = 0;
    std::uint32_t max_size = 0;
};

namespace detail {

// one g draw shared by every nu: bucket alignment-output vectors, then each
// support entry's image size is its bucket's population. Vectors are packed
// exactly (alignment outputs are bounded by 2*delta2*pbar + 2), so equal
// keys mean equal vectors.
inline void bucket_sizes(const AisInstance& inst, const std::vector<double>& g,
                         std::vector<std::uint32_t>& sizes) {
    const int n = inst.support_size();
    std::unordered_map<std::uint64_t, std::uint32_t> buckets;
    buckets.reserve(static_cast<size_t>(n) * 2);
    std::vector<long long> vals(static_cast<size_t>(inst.m));
    std::vector<int> vals_i(static_cast<size_t>(inst.m));
    std::vector<std::uint64_t> key_of(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        inst.alignment_values(inst.psi_at(i), g, vals);
        for (int j = 0; j < inst.m; ++j)
            vals_i[static_cast<size_t>(j)] = static_cast<int>(vals[static_cast<size_t>(j)]);
        const std::uint64_t key = AisInstance::pack_key(vals_i);
        key_of[static_cast<size_t>(i)] = key;
        ++buckets[key];
    }
    for (int i = 0; i < n; ++i) sizes[static_cast<size_t>(i)] = buckets[key_of[static_cast<size_t>(i)]];
}

} // namespace detail

inline ImageSetResult expected_image_size_check(const AisInstance& inst, std::span<const int> nu,
                                                int samples, std::uint64_t seed) {
    const int nu_idx = inst.find(nu);
    std::vector<long long> ref(static_cast<size_t>(inst.m)), cur(static_cast<size_t>(inst.m));
    double sum = 0.0, sumsq = 0.0;
    std::uint32_t mn = std::numeric_limits<std::uint32_t>::max(), mx = 0;
    for (int s = 0; s < samples; ++s) {
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
        const auto g = inst.draw_g(rng);
        inst.alignment_values(inst.psi_at(nu_idx), g, ref);
        std::uint32_t size = 0;
        for (int i = 0; i < inst.support_size(); ++i) {
            inst.alignment_values(inst.psi_at(i), g, cur);
            if (cur == ref) ++size;
        }
        sum += size;
        sumsq += static_cast<double>(size) * size;
        mn = std::min(mn, size);
        mx = std::max(mx, size);
    }
    ImageSetResult r;
    r.nu.assign(nu.begin(), nu.end());
    r.samples = samples;
    r.mean = sum / samples;
    r.stderr_ = std::sqrt(std::max(sumsq / samples - r.mean * r.mean, 0.0) /
                          static_cast<double>(samples));
    r.bound = image_size_bound(inst);
    r.min_size = mn;
    r.max_size = mx;
    return r;
}

// Image-size means for every support value at once (bucketed per draw).
inline std::vector<ImageSetResult> expected_image_size_sweep(const AisInstance& inst, int samples,
                                                             std::uint64_t seed) {
    const int n = inst.support_size();
    std::vector<double> sum(static_cast<size_t>(n), 0.0), sumsq(static_cast<size_t>(n), 0.0);
    std::vector<std::uint32_t> sizes(static_cast<size_t>(n));
    for (int s = 0; s < samples; ++s) {
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
        const auto g = inst.draw_g(rng);
        detail::bucket_sizes(inst, g, sizes);
        for (int i = 0; i < n; ++i) {
            sum[static_cast<size_t>(i)] += sizes[static_cast<size_t>(i)];
            sumsq[static_cast<size_t>(i)] += static_cast<double>(sizes[static_cast<size_t>(i)]) *
                                             sizes[static_cast<size_t>(i)];
        }
    }
    const double bound = image_size_bound(inst);
    std::vector<ImageSetResult> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& r = out[static_cast<size_t>(i)];
        auto zs = inst.support_at(i);
        r.nu.assign(zs.begin(), zs.end());
        r.samples = samples;
        r.mean = sum[static_cast<size_t>(i)] / samples;
        r.stderr_ = std::sqrt(std::max(sumsq[static_cast<size_t>(i)] / samples - r.mean * r.mean, 0.0) /
                              static_cast<double>(samples));
        r.bound = bound;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Entropy checks

class dist_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Dist = std::map<int, double>;
using Joint3 = std::map<std::array<int, 3>, double>;

template <typename MapT> inline void require_distribution(const MapT& p) {
    double total = 0.0;
    for (const auto& [v, prob] : p) {
        if (prob < -1e-12) throw dist_error("negative probability");
        total += prob;
    }
    if (std::abs(total - 1.0) > 1e-9) throw dist_error("probabilities do not sum to 1");
}

template <typename MapT> inline double entropy_bits(const MapT& p) {
    double h = 0.0;
    for (const auto& [v, prob] : p)
        if (prob > 0.0) h -= prob * std::log2(prob);
    return h;
}

inline Dist convolve(const Dist& a, const Dist& b) {
    Dist out;
    for (const auto& [x, px] : a)
        for (const auto& [y, py] : b) out[x + y] += px * py;
    return out;
}

struct SubmodularityCheck {
    // H(U1,U2,U3) + H(U1+U2+U3) <= H(U1+U2, U3) + H(U1, U2+U3), any joint
    double lhs_joint = 0.0, rhs_joint = 0.0;
    // H(U2) + H(U1+U2+U3) <= H(U1+U2) + H(U2+U3), independent marginals
    double lhs_indep = 0.0, rhs_indep = 0.0;
    bool ok_joint = false, ok_indep = false;
    bool ok() const { return ok_joint && ok_indep; }
};

inline SubmodularityCheck check_submodularity(const Joint3& joint, double tol_bits = 1e-9) {
    require_distribution(joint);
    SubmodularityCheck r;

    Dist total, m1, m2, m3;
    std::map<std::array<int, 2>, double> sum12_3, u1_sum23;
    for (const auto& [v, p] : joint) {
        total[v[0] + v[1] + v[2]] += p;
        m1[v[0]] += p;
        m2[v[1]] += p;
        m3[v[2]] += p;
        sum12_3[{v[0] + v[1], v[2]}] += p;
        u1_sum23[{v[0], v[1] + v[2]}] += p;
    }
    r.lhs_joint = entropy_bits(joint) + entropy_bits(total);
    r.rhs_joint = entropy_bits(sum12_3) + entropy_bits(u1_sum23);
    r.ok_joint = r.lhs_joint <= r.rhs_joint + tol_bits;

    const Dist s12 = convolve(m1, m2);
    const Dist s23 = convolve(m2, m3);
    const Dist s123 = convolve(s12, m3);
    r.lhs_indep = entropy_bits(m2) + entropy_bits(s123);
    r.rhs_indep = entropy_bits(s12) + entropy_bits(s23);
    r.ok_indep = r.lhs_indep <= r.rhs_indep + tol_bits;
    return r;
}

inline SubmodularityCheck check_submodularity(const Dist& u1, const Dist& u2, const Dist& u3,
                                              double tol_bits = 1e-9) {
    require_distribution(u1);
    require_distribution(u2);
    require_distribution(u3);
    Joint3 joint;
    for (const auto& [a, pa] : u1)
        for (const auto& [b, pb] : u2)
            for (const auto& [c, pc] : u3) joint[{a, b, c}] += pa * pb * pc;
    return check_submodularity(joint, tol_bits);
}

// Report-only comparison of H(Z_x) - H(Z_check | G) against the DoF term
// (m-1)/2 ln(pbar): at n = 1 the constant factors dominate, so no hard
// assertion is attached. All values in nats.
struct EntropyReport {
    double h_conflict = 0.0;        // H(Z_x), Z_x uniform over its support
    double h_alignment_given_g = 0.0;
    double difference = 0.0;
    double dof_term = 0.0;          // (m-1)/2 * ln(pbar)
};

inline EntropyReport entropy_report(const AisInstance& inst, int samples, std::uint64_t seed) {
    EntropyReport rep;
    const int n = inst.support_size();
    rep.h_conflict = std::log(static_cast<double>(n));
    std::vector<std::uint32_t> sizes(static_cast<size_t>(n));
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
        SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
        const auto g = inst.draw_g(rng);
        detail::bucket_sizes(inst, g, sizes);
        // H(Z_check | G = g) = ln n - (1/n) sum_i ln |bucket(i)|
        double h = std::log(static_cast<double>(n));
        for (int i = 0; i < n; ++i)
            h -= std::log(static_cast<double>(sizes[static_cast<size_t>(i)])) / n;
        acc += h;
    }
    rep.h_alignment_given_g = acc / samples;
    rep.difference = rep.h_conflict - rep.h_alignment_given_g;
    rep.dof_term = (inst.m - 1) / 2.0 * std::log(detail::pbar_eff(inst.pbar));
    return rep;
}

} // namespace timdof
