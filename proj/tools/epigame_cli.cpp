// Command-line front end: scenario analysis with deterministic, machine-first
// reports. Exit codes: 0 ok, 1 property-suite failure, 2 config error,
// 3 size cap exceeded, 4 model precondition violated.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "epigame/analyzer.hpp"
#include "epigame/config.hpp"
#include "epigame/lemma_suites.hpp"
#include "epigame/report.hpp"

using nlohmann::json;
using namespace epigame;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool csv = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_path, "write the report to this path (default: stdout)");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_flag("--csv", args.csv, "emit a CSV table instead of the JSON report");
}

void emit(const CommonArgs& args, const std::string& text) {
    if (args.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) fail(Errc::InvalidConfig, "cannot open output path: " + args.out_path);
    out << text;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::TooLarge:
            return 3;
        case Errc::NotCoordinated:
        case Errc::UnpunishableNode:
        case Errc::NoBite:
        case Errc::RatioTooSmall:
            return 4;
        default:
            return 2;
    }
}

json margin_entry_json(const MarginEntry& e) {
    return {{"history", e.history},
            {"deviator", e.deviator},
            {"dropped", e.dropped},
            {"margin", e.margin}};
}

json bounds_json(const std::map<std::string, double>& bounds) {
    json out = json::object();
    for (const auto& [k, v] : bounds) out[k] = std::isfinite(v) ? json(v) : json("inf");
    return out;
}

// --- reliability -----------------------------------------------------------

struct ReliabilityArgs {
    CommonArgs common;
    std::vector<int> targets;
    bool exact = false;
    bool oracle = false;
    std::optional<long long> mc_trials;
};

int run_reliability(const ReliabilityArgs& args) {
    LoadedScenario loaded = load_scenario_file(args.common.config_path);
    const Scenario& sc = loaded.scenario;
    std::uint64_t seed = args.common.seed.value_or(sc.options.seed);

    std::vector<NodeId> targets(args.targets.begin(), args.targets.end());
    if (targets.empty())
        for (NodeId i = 0; i < sc.graph.node_count(); ++i) targets.push_back(i);

    bool exact = args.exact || (!args.oracle && !args.mc_trials);
    json rows = json::array();
    for (NodeId t : targets) {
        json row{{"node", t}, {"methods", json::object()}};
        std::vector<double> qs;
        if (exact) {
            double q = exact_non_delivery(sc.graph, sc.baseline, {t}, sc.options.caps);
            row["methods"]["exact"] = {{"q", q}, {"reliability", 1.0 - q}};
            qs.push_back(q);
        }
        if (args.oracle) {
            double q = percolation_non_delivery(sc.graph, sc.baseline, {t}, sc.options.caps);
            row["methods"]["percolation"] = {{"q", q}, {"reliability", 1.0 - q}};
            qs.push_back(q);
        }
        if (args.mc_trials) {
            auto est = monte_carlo_non_delivery(sc.graph, sc.baseline, {t}, *args.mc_trials, seed);
            row["methods"]["monte_carlo"] = {{"q", est.mean},
                                             {"reliability", 1.0 - est.mean},
                                             {"std_error", est.std_error},
                                             {"trials", est.trials},
                                             {"seed", est.seed}};
            qs.push_back(est.mean);
        }
        if (qs.size() > 1) {
            double lo = *std::min_element(qs.begin(), qs.end());
            double hi = *std::max_element(qs.begin(), qs.end());
            row["agreement"] = {{"max_abs_diff", hi - lo}};
        }
        rows.push_back(std::move(row));
    }

    json results{{"targets", rows}};
    if (args.common.csv) {
        std::vector<std::vector<std::string>> csv_rows;
        for (const json& row : rows)
            for (auto it = row["methods"].begin(); it != row["methods"].end(); ++it)
                csv_rows.push_back({std::to_string(row["node"].get<int>()), it.key(),
                                    format_double((*it)["q"].get<double>()),
                                    format_double((*it)["reliability"].get<double>())});
        emit(args.common, render_csv({"node", "method", "q", "reliability"}, csv_rows));
    } else {
        emit(args.common, render_report(make_report("reliability", loaded.raw, seed, results)));
    }
    return 0;
}

// --- check-topology ----------------------------------------------------------

int run_check_topology(const CommonArgs& args) {
    LoadedScenario loaded = load_scenario_file(args.config_path);
    const Scenario& sc = loaded.scenario;
    std::uint64_t seed = args.seed.value_or(sc.options.seed);

    DelayMatrix delays = sc.delays ? *sc.delays : compute_delays(sc.graph);

    json edges = json::array();
    for (auto [i, j] : sc.graph.edges())
        edges.push_back({{"from", i},
                         {"to", j},
                         {"punishment_impact", sc.graph.punishment_can_impact(i, j)}});

    json nodes = json::array();
    for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
        int m = max_accusation_delay(sc.graph, delays, i);
        nodes.push_back({{"node", i},
                         {"supports_full_indirect", sc.graph.supports_full_indirect(i)},
                         {"mdel", m == kInfiniteDelay ? json("inf") : json(m)}});
    }

    json results{{"edges", edges},
                 {"nodes", nodes},
                 {"redundant", sc.graph.is_redundant()},
                 {"notes", json::array({"delays follow the shortest-path hop model unless overridden"})}};

    if (args.csv) {
        std::vector<std::vector<std::string>> rows;
        for (const json& e : edges)
            rows.push_back({std::to_string(e["from"].get<int>()), std::to_string(e["to"].get<int>()),
                            e["punishment_impact"].get<bool>() ? "true" : "false"});
        emit(args, render_csv({"from", "to", "punishment_impact"}, rows));
    } else {
        emit(args, render_report(make_report("check-topology", loaded.raw, seed, results)));
    }
    return 0;
}

// --- check-equilibrium -------------------------------------------------------

struct EquilibriumArgs {
    CommonArgs common;
    std::optional<double> omega;
    bool solve_omega = false;
    bool allow_uncoordinated = false;
};

int run_check_equilibrium(const EquilibriumArgs& args) {
    LoadedScenario loaded = load_scenario_file(args.common.config_path);
    Scenario sc = loaded.scenario;
    std::uint64_t seed = args.common.seed.value_or(sc.options.seed);
    if (args.omega) {
        if (*args.omega <= 0.0 || *args.omega >= 1.0)
            fail(Errc::InvalidConfig, "--omega must be in (0,1)");
        sc.params.omega.assign(sc.graph.node_count(), *args.omega);
    }

    if (sc.monitoring == MonitoringMode::Private && !args.allow_uncoordinated &&
        !enforces_coordination(sc.durations, *sc.delays, sc.graph)) {
        for (auto [i, j] : sc.graph.edges())
            for (NodeId k : sc.graph.in_neighbors(i)) {
                int del = delay_of(sc.graph, *sc.delays, k, i, j);
                int dur = sc.durations.duration(sc.graph.edge_index(i, j), k, i);
                if (del == kInfiniteDelay || dur == 0)
                    fail(Errc::NotCoordinated,
                         "punishment windows cannot overlap for defection (" + std::to_string(i) +
                             "," + std::to_string(j) + ") observed by in-neighbor " +
                             std::to_string(k) + "; rerun with --allow-uncoordinated to analyze anyway");
            }
        fail(Errc::NotCoordinated,
             "durations do not enforce coordination; rerun with --allow-uncoordinated to analyze anyway");
    }

    HistoryFamily family = HistoryFamily::standard(sc);
    EquilibriumReport rep = sc.monitoring == MonitoringMode::Public ? dc_check(sc, family)
                                                                    : pdc_check(sc, family);

    json results;
    results["verdict"] = rep.verdict == EquilibriumReport::Verdict::Pass   ? "pass"
                         : rep.verdict == EquilibriumReport::Verdict::Fail ? "fail"
                                                                           : "inconclusive";
    results["margin_count"] = rep.margins.size();
    if (!rep.margins.empty()) results["worst"] = margin_entry_json(rep.worst);
    json margins = json::array();
    for (const MarginEntry& e : rep.margins) margins.push_back(margin_entry_json(e));
    results["margins"] = std::move(margins);
    results["bounds"] = bounds_json(rep.bounds);
    results["notes"] = rep.notes;

    if (args.solve_omega) {
        json per_node = json::array();
        if (sc.durations.is_grim()) {
            for (NodeId i = 0; i < sc.graph.node_count(); ++i) {
                try {
                    per_node.push_back(grim_min_omega(sc, i));
                } catch (const Error&) {
                    per_node.push_back(nullptr);
                }
            }
        } else {
            for (auto& w : solve_min_omega_per_node(sc, family))
                per_node.push_back(w ? json(*w) : json(nullptr));
        }
        results["min_omega"] = per_node;
    }

    if (args.common.csv) {
        std::vector<std::vector<std::string>> rows;
        for (const MarginEntry& e : rep.margins) {
            std::string dropped;
            for (std::size_t k = 0; k < e.dropped.size(); ++k)
                dropped += (k ? " " : "") + std::to_string(e.dropped[k]);
            rows.push_back({e.history, std::to_string(e.deviator), dropped, format_double(e.margin)});
        }
        emit(args.common, render_csv({"history", "deviator", "dropped", "margin"}, rows));
    } else {
        emit(args.common, render_report(make_report("check-equilibrium", loaded.raw, seed, results)));
    }
    return 0;
}

// --- effectiveness -----------------------------------------------------------

struct EffectivenessArgs {
    CommonArgs common;
    std::string sweep;  // "param=v1,v2,..."
};

json effectiveness_row(const EffectivenessResult& res) {
    json row;
    row["folk"] = res.folk;
    row["threshold"] = res.attainable ? json(res.threshold) : json("inf");
    row["effectiveness_interval"] =
        res.attainable ? "(" + format_double(res.threshold) + ", inf)" : "empty";
    if (res.necessary) row["necessary"] = *res.necessary;
    if (res.sufficient)
        row["sufficient"] = std::isfinite(*res.sufficient) ? json(*res.sufficient) : json("inf");
    row["sandwich_ok"] = res.sandwich_ok;
    row["bounds"] = bounds_json(res.bounds);
    row["notes"] = res.notes;
    return row;
}

int run_effectiveness(const EffectivenessArgs& args) {
    LoadedScenario loaded = load_scenario_file(args.common.config_path);
    const Scenario& base = loaded.scenario;
    std::uint64_t seed = args.common.seed.value_or(base.options.seed);

    json results;
    std::vector<std::vector<std::string>> csv_rows;
    if (args.sweep.empty()) {
        EffectivenessResult res = effectiveness_analysis(base);
        results = effectiveness_row(res);
        csv_rows.push_back({"-", "-", format_double(res.folk),
                            res.attainable ? format_double(res.threshold) : "inf",
                            res.sufficient ? format_double(*res.sufficient) : "",
                            res.sandwich_ok ? "true" : "false"});
    } else {
        auto eq = args.sweep.find('=');
        if (eq == std::string::npos)
            fail(Errc::InvalidConfig, "--sweep expects param=v1,v2,... (param: baseline | source)");
        std::string param = args.sweep.substr(0, eq);
        if (param != "baseline" && param != "source")
            fail(Errc::InvalidConfig, "--sweep supports parameters: baseline, source");
        std::vector<double> values;
        std::stringstream ss(args.sweep.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
        if (values.empty()) fail(Errc::InvalidConfig, "--sweep needs at least one value");

        json rows = json::array();
        for (double v : values) {
            Scenario sc = base;
            if (param == "baseline") {
                for (auto [u, w] : sc.graph.edges())
                    if (sc.baseline.node[u][w] > 0.0) sc.baseline.node[u][w] = v;
            } else {
                for (NodeId t : sc.graph.source_targets())
                    if (sc.baseline.source[t] > 0.0) sc.baseline.source[t] = v;
            }
            EffectivenessResult res = effectiveness_analysis(sc);
            json row = effectiveness_row(res);
            row["param"] = param;
            row["value"] = v;
            rows.push_back(row);
            csv_rows.push_back({param, format_double(v), format_double(res.folk),
                                res.attainable ? format_double(res.threshold) : "inf",
                                res.sufficient ? format_double(*res.sufficient) : "",
                                res.sandwich_ok ? "true" : "false"});
        }
        results = json{{"sweep", rows}};
    }

    if (args.common.csv) {
        emit(args.common,
             render_csv({"param", "value", "folk", "threshold", "sufficient", "sandwich_ok"}, csv_rows));
    } else {
        emit(args.common, render_report(make_report("effectiveness", loaded.raw, seed, results)));
    }
    return 0;
}

// --- verify-lemmas ------------------------------------------------------------

struct VerifyArgs {
    CommonArgs common;
    int cases = 200;
    std::string inject_fault;
};

int run_verify_lemmas(const VerifyArgs& args) {
    SuiteOptions opts;
    opts.seed = args.common.seed.value_or(42);
    opts.cases = args.cases;
    if (!args.inject_fault.empty()) {
        if (args.inject_fault != "ds-expiry")
            fail(Errc::InvalidConfig, "unknown fault: " + args.inject_fault);
        opts.inject_ds_expiry_fault = true;
    }

    std::vector<SuiteResult> suites = run_lemma_suites(opts);
    bool any_failure = false;
    json rows = json::array();
    std::vector<std::vector<std::string>> csv_rows;
    for (const SuiteResult& s : suites) {
        any_failure = any_failure || !s.ok();
        rows.push_back({{"suite", s.name},
                        {"cases", s.cases},
                        {"failures", s.failures},
                        {"counterexamples", s.counterexamples}});
        csv_rows.push_back({s.name, std::to_string(s.cases), std::to_string(s.failures)});
    }
    json results{{"suites", rows}, {"all_passed", !any_failure}};
    if (args.cases == 0) results["warning"] = "0 cases requested: vacuous pass";

    json config{{"cases", args.cases}, {"fault", args.inject_fault}};
    if (args.common.csv) {
        emit(args.common, render_csv({"suite", "cases", "failures"}, csv_rows));
    } else {
        emit(args.common, render_report(make_report("verify-lemmas", config, opts.seed, results)));
    }
    for (const SuiteResult& s : suites)
        if (!s.ok()) {
            std::cerr << "suite " << s.name << ": " << s.failures << "/" << s.cases << " failed\n";
            for (const std::string& ce : s.counterexamples) std::cerr << "  " << ce << "\n";
        }
    return any_failure ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repeated epidemic dissemination game analyzer"};
    app.require_subcommand(1);

    ReliabilityArgs rel;
    auto* rel_cmd = app.add_subcommand("reliability", "per-target delivery probabilities");
    add_common(rel_cmd, rel.common);
    rel_cmd->add_option("--targets", rel.targets, "target nodes (default: all)");
    rel_cmd->add_flag("--exact", rel.exact, "exact wave recursion");
    rel_cmd->add_flag("--oracle", rel.oracle, "edge-percolation enumeration");
    rel_cmd->add_option("--mc", rel.mc_trials, "Monte Carlo with this many trials");

    CommonArgs topo;
    auto* topo_cmd = app.add_subcommand("check-topology", "per-edge punishment impact and redundancy");
    add_common(topo_cmd, topo);

    EquilibriumArgs eq;
    auto* eq_cmd = app.add_subcommand("check-equilibrium", "drop-deviation equilibrium check");
    add_common(eq_cmd, eq.common);
    eq_cmd->add_option("--omega", eq.omega, "override every node's discount factor");
    eq_cmd->add_flag("--solve-omega", eq.solve_omega, "also solve the per-node minimum omega");
    eq_cmd->add_flag("--allow-uncoordinated", eq.allow_uncoordinated,
                     "analyze private scenarios whose durations do not enforce coordination");

    EffectivenessArgs eff;
    auto* eff_cmd = app.add_subcommand("effectiveness", "benefit-to-cost threshold and bounds");
    add_common(eff_cmd, eff.common);
    eff_cmd->add_option("--sweep", eff.sweep, "sweep a parameter, e.g. baseline=0.8,0.9,0.95");

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand("verify-lemmas", "randomized property suites");
    add_common(ver_cmd, ver.common, /*config_required=*/false);
    ver_cmd->add_option("--cases", ver.cases, "cases per suite (default 200)");
    ver_cmd->add_option("--inject-fault", ver.inject_fault, "CI self-test fault")->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rel_cmd->parsed()) return run_reliability(rel);
        if (topo_cmd->parsed()) return run_check_topology(topo);
        if (eq_cmd->parsed()) return run_check_equilibrium(eq);
        if (eff_cmd->parsed()) return run_effectiveness(eff);
        if (ver_cmd->parsed()) return run_verify_lemmas(ver);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
