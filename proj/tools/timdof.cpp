// Command-line front end: topology analysis, scheme synthesis, channel
// simulation, and the aligned-image-set verification suite.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "timdof/ais.hpp"
#include "timdof/bounds.hpp"
#include "timdof/render.hpp"
#include "timdof/simulator.hpp"

namespace {

using namespace timdof;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitInvalidTopology = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open `" + path + "`");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write `" + path + "`");
    out << content;
}

struct AnalyzeArgs {
    std::string path;
    bool json = false;
    std::string dot_dir;
    int max_cycle_len = 9;
    long long max_cycles = 100000;
    bool exhaustive = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const auto topo = parse_topology(read_file(a.path));
    AnalyzeOptions opt;
    opt.max_cycle_len = a.max_cycle_len;
    opt.max_cycles = a.max_cycles;
    opt.exhaustive = a.exhaustive;
    const auto rep = analyze(topo, opt);
    std::cout << emit_report(rep, a.json ? "json" : "text");
    if (!a.dot_dir.empty()) {
        std::filesystem::create_directories(a.dot_dir);
        write_file(a.dot_dir + "/combined.dot", dot_combined(rep.bundle));
        write_file(a.dot_dir + "/reduced.dot", dot_reduced(rep.bundle));
        if (rep.certificate) write_file(a.dot_dir + "/cycle.dot", dot_cycle(*rep.certificate));
    }
    return kExitOk;
}

struct SchemeArgs {
    std::string path;
    std::string type = "auto";
    bool json = false;
};

SchemeResult build_by_type(const GraphBundle& bundle, const std::string& type,
                           std::string& name_out) {
    if (type == "half") {
        name_out = "half";
        return build_half_scheme(bundle);
    }
    if (type == "four-ninths") {
        name_out = "four_ninths";
        return build_four_ninths_scheme(bundle);
    }
    // auto: prefer the 2-slot scheme, fall back to the 3-slot one
    auto half = build_half_scheme(bundle);
    if (half.feasible()) {
        name_out = "half";
        return half;
    }
    auto four9 = build_four_ninths_scheme(bundle);
    name_out = four9.feasible() ? "four_ninths" : "none";
    if (!four9.feasible())
        four9.reason = "half: " + half.reason + "; four-ninths: " + four9.reason;
    return four9;
}

int cmd_scheme(const SchemeArgs& a) {
    const auto topo = parse_topology(read_file(a.path));
    const auto bundle = build_bundle(topo);
    std::string name;
    const auto res = build_by_type(bundle, a.type, name);
    if (!res.feasible()) {
        if (a.json) {
            nlohmann::json j;
            j["feasible"] = false;
            j["reason"] = res.reason;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "infeasible: " << res.reason << "\n";
        }
        return kExitOk;
    }
    const auto validation = validate_scheme_structure(*res.scheme, topo);
    if (a.json) {
        auto j = scheme_json(*res.scheme);
        j["validation_pass"] = validation.pass;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << scheme_text(*res.scheme, &validation);
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string path;
    std::string scheme_type = "auto";
    SimConfig cfg;
    std::string csv_path;
    bool json = false;
};

int cmd_simulate(const SimulateArgs& a) {
    const auto topo = parse_topology(read_file(a.path));
    const auto bundle = build_bundle(topo);
    std::string name;
    const auto res = build_by_type(bundle, a.scheme_type, name);
    if (!res.feasible()) {
        std::cerr << "no scheme to simulate: " << res.reason << "\n";
        return kExitUsage;
    }
    const auto sum = a.cfg.awgn ? run_awgn_trials(*res.scheme, topo, a.cfg)
                                : run_deterministic_trials(*res.scheme, topo, a.cfg);
    if (a.json) {
        std::cout << summary_json(a.cfg, name, sum).dump(2) << "\n";
    } else {
        std::cout << "scheme " << name << " (" << res.scheme->nominal_dof.str()
                  << " nominal DoF), " << sum.trials << " trials\n";
        std::cout << "  err_rate_total " << csv_format_double(sum.err_rate_total) << " (mac "
                  << csv_format_double(sum.err_mac) << ", private "
                  << csv_format_double(sum.err_private) << ")\n";
        std::cout << "  rate_ratio_mean " << csv_format_double(sum.rate_ratio_mean)
                  << " (nominal " << csv_format_double(sum.nominal_rate_ratio) << ")\n";
    }
    if (!a.csv_path.empty())
        write_file(a.csv_path, summary_csv_header(a.cfg.awgn) + summary_csv_row(a.cfg, name, sum));
    return kExitOk;
}

struct OracleArgs {
    std::string check = "all";
    int m = 3;
    int pbar = 3;
    int samples = 2000;
    int pairs = 50;
    std::uint64_t seed = 1;
    double delta1 = 1.0;
    double delta2 = 2.0;
    double grid_step = 1e-6;
    std::string csv_path;
};

struct VerdictTable {
    std::ostringstream csv;
    bool all_ok = true;
    VerdictTable() { csv << "check,params,measured,bound,margin\n"; }

    void row(const std::string& check, const std::string& params, double measured, double bound) {
        const bool ok = measured <= bound;
        all_ok = all_ok && ok;
        std::cout << "[" << check << "] " << params << "  measured=" << csv_format_double(measured)
                  << " bound=" << csv_format_double(bound) << "  " << (ok ? "PASS" : "FAIL")
                  << "\n";
        csv << check << "," << params << "," << csv_format_double(measured) << ","
            << csv_format_double(bound) << "," << csv_format_double(bound - measured) << "\n";
    }
};

AisInstance default_instance(const OracleArgs& a) {
    ChannelModel model(a.delta1, a.delta2);
    std::vector<std::uint8_t> flags(static_cast<size_t>(a.m), 0);
    // one entry==exit set, matching the reference completed-cycle picture
    flags[0] = 1;
    return AisInstance::build(a.m, a.pbar, default_conflict_coeffs(a.m, model, a.seed), flags,
                              model, AisInstance::PsiMode::lex_min);
}

int cmd_oracle(const OracleArgs& a) {
    ChannelModel model(a.delta1, a.delta2);
    VerdictTable table;
    const bool all = a.check == "all";

    if (all || a.check == "interval") {
        for (int x = 0; x <= a.pbar; ++x)
            for (int y = 0; y <= a.pbar; ++y) {
                if (x == y) continue;
                const auto r = check_alignment_interval(x, y, model, a.grid_step);
                table.row("interval", "a=" + std::to_string(x) + ";a'=" + std::to_string(y),
                          r.extent, r.bound);
            }
    }
    if (all || a.check == "prob") {
        const auto inst = default_instance(a);
        SplitMix64 rng(substream_seed(a.seed, 77));
        const int n = inst.support_size();
        for (int p = 0; p < a.pairs; ++p) {
            const int iu = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            int iv = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
            if (iv == iu) iv = (iv + 1) % n;
            const auto nu = inst.support_at(iu);
            const auto la = inst.support_at(iv);
            const auto r = estimate_alignment_probability(inst, nu, la, a.samples,
                                                          substream_seed(a.seed, static_cast<std::uint64_t>(p)));
            table.row("prob", "pair=" + std::to_string(p), r.estimate, r.bound + 3.0 * r.stderr_);
        }
    }
    if (all || a.check == "size") {
        const auto inst = default_instance(a);
        const auto sweep = expected_image_size_sweep(inst, a.samples, a.seed);
        double worst_margin = std::numeric_limits<double>::max();
        size_t worst = 0;
        for (size_t i = 0; i < sweep.size(); ++i) {
            const double margin = sweep[i].bound + 3.0 * sweep[i].stderr_ - sweep[i].mean;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst = i;
            }
        }
        const auto& w = sweep[worst];
        table.row("size", "nu_count=" + std::to_string(sweep.size()) + ";worst=" +
                              std::to_string(worst),
                  w.mean, w.bound + 3.0 * w.stderr_);
    }
    if (all || a.check == "submod") {
        SplitMix64 rng(substream_seed(a.seed, 99));
        for (int i = 0; i < 100; ++i) {
            auto random_dist = [&]() {
                Dist d;
                const int support = 2 + static_cast<int>(rng.next_below(5)); // up to 6 points
                double total = 0.0;
                for (int v = 0; v < support; ++v) {
                    const double w = 0.05 + rng.next_double();
                    d[v] = w;
                    total += w;
                }
                for (auto& [v, p] : d) p /= total;
                return d;
            };
            const auto chk = check_submodularity(random_dist(), random_dist(), random_dist());
            table.row("submod", "triple=" + std::to_string(i) + ";joint", chk.lhs_joint,
                      chk.rhs_joint + 1e-9);
            table.row("submod", "triple=" + std::to_string(i) + ";indep", chk.lhs_indep,
                      chk.rhs_indep + 1e-9);
        }
    }
    if (all || a.check == "entropy") {
        const auto inst = default_instance(a);
        const auto rep = entropy_report(inst, std::min(a.samples, 500), a.seed);
        std::cout << "[entropy] report only: H(Zx)=" << csv_format_double(rep.h_conflict)
                  << " H(Zcheck|G)=" << csv_format_double(rep.h_alignment_given_g)
                  << " diff=" << csv_format_double(rep.difference)
                  << " dof_term=" << csv_format_double(rep.dof_term) << " nats\n";
    }

    std::cout << "[summary] " << (table.all_ok ? "all checks passed" : "CHECK FAILURES") << "\n";
    if (!a.csv_path.empty()) write_file(a.csv_path, table.csv.str());
    return kExitOk;
}

struct FixturesArgs {
    std::string write_dir;
    std::string name;
};

int cmd_fixtures(const FixturesArgs& a) {
    if (!a.name.empty()) {
        std::cout << fixture_text(a.name);
        return kExitOk;
    }
    if (!a.write_dir.empty()) {
        std::filesystem::create_directories(a.write_dir);
        for (const auto& [name, text] : fixture_corpus())
            write_file(a.write_dir + "/" + name + ".tim", text);
        std::cout << "wrote " << fixture_corpus().size() << " fixtures to " << a.write_dir << "\n";
        return kExitOk;
    }
    for (const auto& [name, text] : fixture_corpus()) {
        const auto t = parse_topology(text);
        std::cout << name << ": " << t.users << " users\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"partially connected interference network analyzer (unit coherence time)"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "graphs, feasibility, and the DoF bound");
    analyze_cmd->add_option("topology", an.path, "topology file")->required();
    analyze_cmd->add_flag("--json", an.json, "JSON report");
    analyze_cmd->add_option("--dot", an.dot_dir, "write DOT files into this directory");
    analyze_cmd->add_option("--max-cycle-len", an.max_cycle_len, "odd-cycle length cap")
        ->default_val(9);
    analyze_cmd->add_option("--max-cycles", an.max_cycles, "odd-cycle count cap")
        ->default_val(100000);
    analyze_cmd->add_flag("--exhaustive", an.exhaustive, "lift the cycle-search caps");

    SchemeArgs sc;
    auto* scheme_cmd = app.add_subcommand("scheme", "synthesize a transmission scheme");
    scheme_cmd->add_option("topology", sc.path, "topology file")->required();
    scheme_cmd->add_option("--type", sc.type, "half | four-ninths | auto")
        ->check(CLI::IsMember({"half", "four-ninths", "auto"}))
        ->default_val("auto");
    scheme_cmd->add_flag("--json", sc.json, "JSON output");

    SimulateArgs si;
    auto* sim_cmd = app.add_subcommand("simulate", "run channel trials for a scheme");
    sim_cmd->add_option("topology", si.path, "topology file")->required();
    sim_cmd->add_option("--scheme", si.scheme_type, "half | four-ninths | auto")
        ->check(CLI::IsMember({"half", "four-ninths", "auto"}))
        ->default_val("auto");
    sim_cmd->add_option("--pbar", si.cfg.pbar, "integer input ceiling")->default_val(1000);
    sim_cmd->add_option("--qc", si.cfg.qc, "common alphabet size")->default_val(4);
    sim_cmd->add_option("--trials", si.cfg.trials, "trial count")->default_val(500);
    sim_cmd->add_option("--seed", si.cfg.seed, "rng seed")->default_val(1);
    sim_cmd->add_option("--threads", si.cfg.threads, "worker threads")->default_val(1);
    sim_cmd->add_option("--delta-c", si.cfg.delta_c, "common-level backoff in (0,1]")
        ->default_val(1.0);
    sim_cmd->add_flag("--awgn", si.cfg.awgn, "continuous AWGN mode");
    sim_cmd->add_option("--snr-db", si.cfg.snr_db, "nominal SNR in dB (awgn)")->default_val(30.0);
    sim_cmd->add_option("--alphabet", si.cfg.awgn_alphabet, "private PAM order (awgn)")
        ->default_val(16);
    sim_cmd->add_option("--csv", si.csv_path, "write summary CSV here");
    sim_cmd->add_flag("--json", si.json, "JSON summary");

    OracleArgs orc;
    auto* oracle_cmd = app.add_subcommand("oracle", "aligned-image-set verification suite");
    oracle_cmd->add_option("--check", orc.check, "all|interval|prob|size|submod|entropy")
        ->check(CLI::IsMember({"all", "interval", "prob", "size", "submod", "entropy"}))
        ->default_val("all");
    oracle_cmd->add_option("--m", orc.m, "number of conflict forms (odd)")->default_val(3);
    oracle_cmd->add_option("--pbar", orc.pbar, "alphabet ceiling")->default_val(3);
    oracle_cmd->add_option("--samples", orc.samples, "Monte-Carlo draws")->default_val(2000);
    oracle_cmd->add_option("--pairs", orc.pairs, "lambda/nu pairs for the probability check")
        ->default_val(50);
    oracle_cmd->add_option("--seed", orc.seed, "rng seed")->default_val(1);
    oracle_cmd->add_option("--delta1", orc.delta1, "support lower edge")->default_val(1.0);
    oracle_cmd->add_option("--delta2", orc.delta2, "support upper edge")->default_val(2.0);
    oracle_cmd->add_option("--grid-step", orc.grid_step, "interval-scan grid step")
        ->default_val(1e-6);
    oracle_cmd->add_option("--csv", orc.csv_path, "write verdict CSV here");

    FixturesArgs fx;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "bundled example topologies");
    fixtures_cmd->add_option("--write", fx.write_dir, "write .tim files into this directory");
    fixtures_cmd->add_option("--name", fx.name, "print one fixture's canonical text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(an);
        if (scheme_cmd->parsed()) return cmd_scheme(sc);
        if (sim_cmd->parsed()) return cmd_simulate(si);
        if (oracle_cmd->parsed()) return cmd_oracle(orc);
        if (fixtures_cmd->parsed()) return cmd_fixtures(fx);
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const topology_error& e) {
        if (e.which() == topology_error::kind::unknown_fixture) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
        std::cerr << "invalid topology: " << e.what() << "\n";
        return kExitInvalidTopology;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
