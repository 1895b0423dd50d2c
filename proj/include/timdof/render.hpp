#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "timdof/bounds.hpp"
#include "timdof/scheme.hpp"
#include "timdof/simulator.hpp"

namespace timdof {

class unknown_format : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json edges_json(const std::vector<Edge>& edges) {
    auto arr = nlohmann::json::array();
    for (const auto& [a, b] : edges) arr.push_back({a, b});
    return arr;
}

inline nlohmann::json sets_json(const std::vector<std::vector<int>>& sets) {
    auto arr = nlohmann::json::array();
    for (const auto& s : sets) arr.push_back(s);
    return arr;
}

inline std::string set_label(const std::vector<int>& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out;
}

} // namespace detail

inline nlohmann::json cycle_json(const CompletedCycle& c) {
    nlohmann::json j;
    j["sets"] = detail::sets_json(c.sets);
    auto edges = nlohmann::json::array();
    for (const auto& [exit, entry] : c.conflict_edges) edges.push_back({exit, entry});
    j["conflict_edges"] = edges;
    j["paths"] = detail::sets_json(c.paths);
    j["m"] = c.params.m;
    j["m2"] = c.params.m2;
    j["l_sigma"] = c.params.l_sigma;
    return j;
}

inline nlohmann::json report_json(const BoundReport& rep) {
    const auto& b = rep.bundle;
    nlohmann::json j;
    j["topology"]["users"] = b.topology.users;
    j["topology"]["heard"] = detail::sets_json(b.topology.heard);
    j["alignment_edges"] = detail::edges_json(b.alignment_edges);
    j["conflict_edges"] = detail::edges_json(b.conflict_edges);
    j["alignment_sets"] = detail::sets_json(b.sets);
    j["internal_conflicts"] = detail::edges_json(b.internal_conflicts);

    auto rv = nlohmann::json::array();
    for (int i = 0; i < b.reduced_count(); ++i) rv.push_back(b.reduced_set(i));
    j["reduced_graph"]["vertices"] = rv;
    j["reduced_graph"]["edges"] = detail::edges_json(b.reduced_edges);
    j["reduced_graph"]["bipartite"] = b.reduced_bipartite;

    j["best_completed_cycle"] =
        rep.certificate ? cycle_json(*rep.certificate) : nlohmann::json(nullptr);
    if (rep.theorem1_bound)
        j["theorem1_bound"] = {{"num", rep.theorem1_bound->num}, {"den", rep.theorem1_bound->den}};
    else
        j["theorem1_bound"] = nullptr;
    j["half_dof"] = {{"feasible", rep.half_dof_feasible}, {"c1_ok", rep.c1_ok}, {"c2_ok", rep.c2_ok}};
    j["possibly_not_tightest"] = rep.possibly_not_tightest;
    j["notes"] = rep.notes;
    return j;
}

inline std::string report_text(const BoundReport& rep) {
    const auto& b = rep.bundle;
    std::ostringstream os;
    auto edge_list = [](const std::vector<Edge>& edges) {
        std::string s;
        for (size_t i = 0; i < edges.size(); ++i) {
            if (i) s += " ";
            s += "{" + std::to_string(edges[i].first) + "," + std::to_string(edges[i].second) + "}";
        }
        return s.empty() ? "(none)" : s;
    };
    os << "users              : " << b.topology.users << "\n";
    os << "alignment edges    : " << edge_list(b.alignment_edges) << "\n";
    os << "conflict edges     : ";
    if (b.conflict_edges.empty()) os << "(none)";
    for (size_t i = 0; i < b.conflict_edges.size(); ++i) {
        const auto& e = b.conflict_edges[i];
        os << (i ? " " : "") << "{" << e.first << "," << e.second << "}(";
        const auto& sources = b.conflict_sources.at(e);
        for (size_t s = 0; s < sources.size(); ++s)
            os << (s ? ";" : "") << "rx" << sources[s].first << "<-" << sources[s].second;
        os << ")";
    }
    os << "\n";
    os << "alignment sets     : ";
    for (size_t i = 0; i < b.sets.size(); ++i)
        os << (i ? " " : "") << "{" << detail::set_label(b.sets[i]) << "}";
    os << "\n";
    os << "internal conflicts : " << edge_list(b.internal_conflicts) << "\n";
    os << "reduced graph      : " << b.reduced_count() << " vertices, "
       << b.reduced_edges.size() << " edges, "
       << (b.reduced_bipartite ? "bipartite" : "odd cycle present") << "\n";
    os << "half DoF (C1&C2)   : " << (rep.half_dof_feasible ? "feasible" : "not feasible")
       << " [C1 " << (rep.c1_ok ? "ok" : "fails") << ", C2 " << (rep.c2_ok ? "ok" : "fails")
       << "]\n";
    if (rep.theorem1_bound) {
        os << "theorem-1 bound    : " << rep.theorem1_bound->str() << " (m="
           << rep.certificate->params.m << ", m2=" << rep.certificate->params.m2
           << ", l_sigma=" << rep.certificate->params.l_sigma << ")\n";
        os << "certificate cycle  : ";
        for (size_t j = 0; j < rep.certificate->conflict_edges.size(); ++j) {
            const auto& [exit, entry] = rep.certificate->conflict_edges[j];
            os << (j ? " " : "") << exit << "->" << entry;
        }
        os << "\n";
        if (rep.possibly_not_tightest) os << "note               : cycle search capped\n";
    }
    os << "notes              : " << rep.notes << "\n";
    return os.str();
}

inline std::string emit_report(const BoundReport& rep, const std::string& format) {
    if (format == "json") return report_json(rep).dump(2) + "\n";
    if (format == "text") return report_text(rep);
    throw unknown_format("unknown report format `" + format + "`");
}

inline nlohmann::json scheme_json(const TransmissionScheme& s) {
    nlohmann::json j;
    j["slots"] = s.slots;
    nlohmann::json colors;
    for (size_t i = 0; i < s.sets.size(); ++i)
        colors[detail::set_label(s.sets[i])] = s.set_color[i];
    j["colors"] = colors;
    j["common_active"] = s.common_active;
    j["powers"] = {{"private", s.private_power}, {"common", s.common_power}};
    j["nominal_dof"] = {{"num", s.nominal_dof.num}, {"den", s.nominal_dof.den}};
    j["decode_order"] = {"commons", "private"};
    return j;
}

inline std::string scheme_text(const TransmissionScheme& s, const SchemeValidation* v = nullptr) {
    std::ostringstream os;
    os << "slots      : " << s.slots << "\n";
    os << "nominal DoF: " << s.nominal_dof.str() << " per user\n";
    os << "commons    : " << (s.common_active ? "active (all slots, power 0.5)" : "off") << "\n";
    os << "colors     :";
    for (size_t i = 0; i < s.sets.size(); ++i)
        os << " {" << detail::set_label(s.sets[i]) << "}=" << s.set_color[i];
    os << "\n";
    if (v) {
        os << "validation : " << (v->pass ? "pass" : "FAIL") << "\n";
        for (const auto& chk : v->receivers) {
            os << "  rx " << chk.receiver << ": slots " << (chk.slots_ok ? "ok" : "FAIL")
               << ", mac " << (chk.mac_ok ? "ok" : "FAIL") << ", private "
               << (chk.private_ok ? "ok" : "FAIL");
            if (chk.free_slot) os << ", free slot " << chk.free_slot;
            os << "\n";
        }
    }
    return os.str();
}

// DOT conventions: solid black alignment edges, dashed red conflict edges.
inline std::string dot_combined(const GraphBundle& b) {
    std::ostringstream os;
    os << "graph alignment_conflict {\n";
    for (int k = 1; k <= b.topology.users; ++k) os << "  " << k << " [label=\"W" << k << "\"];\n";
    for (const auto& [x, y] : b.alignment_edges)
        os << "  " << x << " -- " << y << " [style=solid, color=black];\n";
    for (const auto& [x, y] : b.conflict_edges)
        os << "  " << x << " -- " << y << " [style=dashed, color=red];\n";
    os << "}\n";
    return os.str();
}

inline std::string dot_reduced(const GraphBundle& b) {
    std::ostringstream os;
    os << "graph reduced {\n";
    for (int i = 0; i < b.reduced_count(); ++i)
        os << "  A" << i << " [label=\"{" << detail::set_label(b.reduced_set(i)) << "}\"];\n";
    for (const auto& [x, y] : b.reduced_edges) os << "  A" << x << " -- A" << y << ";\n";
    os << "}\n";
    return os.str();
}

inline std::string dot_cycle(const CompletedCycle& c) {
    std::ostringstream os;
    os << "graph completed_cycle {\n";
    std::set<int> nodes;
    const int m = c.params.m;
    for (int j = 0; j < m; ++j) {
        nodes.insert(c.entry_of(j));
        nodes.insert(c.exit_of(j));
        for (int v : c.paths[static_cast<size_t>(j)]) nodes.insert(v);
    }
    for (int v : nodes) os << "  " << v << " [label=\"W" << v << "\"];\n";
    for (int j = 0; j < m; ++j) {
        const auto& path = c.paths[static_cast<size_t>(j)];
        for (size_t i = 0; i + 1 < path.size(); ++i)
            os << "  " << path[i] << " -- " << path[i + 1] << " [style=solid, color=black];\n";
    }
    for (const auto& [exit, entry] : c.conflict_edges)
        os << "  " << exit << " -- " << entry << " [style=dashed, color=red];\n";
    os << "}\n";
    return os.str();
}

inline std::string csv_format_double(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline std::string summary_csv_header(bool awgn) {
    std::string h = "pbar,qc,trials,seed,scheme,err_rate_total,err_mac,err_private,rate_ratio_mean";
    if (awgn) h += ",snr_db";
    return h + "\n";
}

inline std::string summary_csv_row(const SimConfig& cfg, const std::string& scheme_name,
                                   const TrialSummary& sum) {
    std::ostringstream os;
    os << cfg.pbar << "," << cfg.qc << "," << cfg.trials << "," << cfg.seed << "," << scheme_name
       << "," << csv_format_double(sum.err_rate_total) << "," << csv_format_double(sum.err_mac)
       << "," << csv_format_double(sum.err_private) << ","
       << csv_format_double(sum.rate_ratio_mean);
    if (cfg.awgn) os << "," << csv_format_double(cfg.snr_db);
    return os.str() + "\n";
}

inline nlohmann::json summary_json(const SimConfig& cfg, const std::string& scheme_name,
                                   const TrialSummary& sum) {
    nlohmann::json j;
    j["config"] = {{"pbar", cfg.pbar},     {"qc", cfg.qc},
                   {"trials", cfg.trials}, {"seed", cfg.seed},
                   {"delta_c", cfg.delta_c},
                   {"mode", cfg.awgn ? "awgn" : "deterministic"}};
    if (cfg.awgn) {
        j["config"]["snr_db"] = cfg.snr_db;
        j["config"]["alphabet"] = cfg.awgn_alphabet;
    }
    j["scheme"] = scheme_name;
    j["users"] = sum.users;
    j["results"] = {{"err_rate_total", sum.err_rate_total},
                    {"err_mac", sum.err_mac},
                    {"err_private", sum.err_private},
                    {"rate_ratio_mean", sum.rate_ratio_mean},
                    {"nominal_rate_ratio", sum.nominal_rate_ratio},
                    {"rx_failed", sum.rx_failed},
                    {"failed_trials", sum.failed_trials}};
    return j;
}

} // namespace timdof
