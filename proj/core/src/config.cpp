#include "epigame/config.hpp"

#include <fstream>
#include <sstream>

namespace epigame {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    fail(Errc::InvalidConfig, path + ": " + why);
}

const json& require(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) bad(path + "." + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        // probabilities may be written as decimal strings
        try {
            std::size_t used = 0;
            double v = std::stod(j.get<std::string>(), &used);
            if (used == j.get<std::string>().size()) return v;
        } catch (...) {
        }
    }
    bad(path, "expected a number");
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<int>();
}

std::vector<double> per_node_values(const json& j, int n, const std::string& path) {
    std::vector<double> out(n);
    if (j.is_array()) {
        if (static_cast<int>(j.size()) != n) bad(path, "expected " + std::to_string(n) + " entries");
        for (int i = 0; i < n; ++i) out[i] = as_number(j[i], path + "[" + std::to_string(i) + "]");
    } else {
        double v = as_number(j, path);
        out.assign(n, v);
    }
    return out;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) bad("config", "expected a JSON object");
    Scenario sc;

    // --- graph ---
    const json& jg = require(j, "graph", "config");
    int n = as_int(require(jg, "nodes", "graph"), "graph.nodes");
    std::vector<std::pair<NodeId, NodeId>> edges;
    const json& je = require(jg, "edges", "graph");
    if (!je.is_array()) bad("graph.edges", "expected a list of [u,v] pairs");
    for (std::size_t k = 0; k < je.size(); ++k) {
        const json& e = je[k];
        std::string path = "graph.edges[" + std::to_string(k) + "]";
        if (!e.is_array() || e.size() != 2) bad(path, "expected [u,v]");
        edges.emplace_back(as_int(e[0], path), as_int(e[1], path));
    }
    std::vector<NodeId> source_targets;
    const json& jst = require(jg, "source_targets", "graph");
    if (!jst.is_array() || jst.empty()) bad("graph.source_targets", "expected a non-empty list");
    for (std::size_t k = 0; k < jst.size(); ++k)
        source_targets.push_back(as_int(jst[k], "graph.source_targets[" + std::to_string(k) + "]"));
    try {
        sc.graph = OverlayGraph::build(n, edges, source_targets);
    } catch (const Error& err) {
        bad("graph", err.what());
    }

    DelayModelConfig delay_config;
    if (auto it = jg.find("delay_overrides"); it != jg.end()) {
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& ov = (*it)[k];
            std::string path = "graph.delay_overrides[" + std::to_string(k) + "]";
            DelayOverride d;
            d.observer = as_int(require(ov, "observer", path), path + ".observer");
            d.accused = as_int(require(ov, "accused", path), path + ".accused");
            d.victim = as_int(require(ov, "victim", path), path + ".victim");
            const json& dv = require(ov, "delay", path);
            if (dv.is_string() && dv.get<std::string>() == "inf")
                d.delay = kInfiniteDelay;
            else
                d.delay = as_int(dv, path + ".delay");
            delay_config.overrides.push_back(d);
        }
    }

    // --- profile ---
    const json& jp = require(j, "profile", "config");
    sc.baseline = ForwardProfile::zeros(sc.graph);
    const json& jsp = require(jp, "source_probs", "profile");
    if (jsp.is_array()) {
        for (std::size_t k = 0; k < jsp.size(); ++k) {
            const json& entry = jsp[k];
            std::string path = "profile.source_probs[" + std::to_string(k) + "]";
            NodeId node = as_int(require(entry, "node", path), path + ".node");
            if (node < 0 || node >= n) bad(path + ".node", "node index out of range");
            sc.baseline.source[node] = as_number(require(entry, "p", path), path + ".p");
        }
    } else {
        double v = as_number(jsp, "profile.source_probs");
        for (NodeId t : sc.graph.source_targets()) sc.baseline.source[t] = v;
    }
    const json& jnp = require(jp, "node_probs", "profile");
    if (jnp.is_array()) {
        for (std::size_t k = 0; k < jnp.size(); ++k) {
            const json& entry = jnp[k];
            std::string path = "profile.node_probs[" + std::to_string(k) + "]";
            NodeId from = as_int(require(entry, "from", path), path + ".from");
            NodeId to = as_int(require(entry, "to", path), path + ".to");
            if (!(from >= 0 && from < n && to >= 0 && to < n && sc.graph.has_edge(from, to)))
                bad(path, "not an edge of the graph");
            sc.baseline.node[from][to] = as_number(require(entry, "p", path), path + ".p");
        }
    } else {
        double v = as_number(jnp, "profile.node_probs");
        for (auto [u, vtx] : sc.graph.edges()) sc.baseline.node[u][vtx] = v;
    }
    try {
        validate_baseline_profile(sc.graph, sc.baseline);
    } catch (const Error& err) {
        bad("profile", err.what());
    }

    // --- utility ---
    const json& ju = require(j, "utility", "config");
    sc.params.beta = per_node_values(require(ju, "beta", "utility"), n, "utility.beta");
    sc.params.gamma = ju.contains("gamma") ? per_node_values(ju["gamma"], n, "utility.gamma")
                                           : std::vector<double>(n, 1.0);
    sc.params.omega = ju.contains("omega") ? per_node_values(ju["omega"], n, "utility.omega")
                                           : std::vector<double>(n, 0.9);
    try {
        sc.params.validate(n);
    } catch (const Error& err) {
        bad("utility", err.what());
    }

    // --- monitoring ---
    bool is_private = false;
    if (auto it = j.find("monitoring"); it != j.end()) {
        std::string mode = it->value("mode", "public");
        if (mode == "private")
            is_private = true;
        else if (mode != "public")
            bad("monitoring.mode", "expected \"public\" or \"private\"");
        std::string model = it->value("delay_model", "shortest_path_hops");
        if (model != "shortest_path_hops")
            bad("monitoring.delay_model", "unknown delay model \"" + model + "\"");
    }
    sc.monitoring = is_private ? MonitoringMode::Private : MonitoringMode::Public;

    // --- strategy ---
    bool grim = false;
    int tau = 1;
    bool coordinated = is_private;
    if (auto it = j.find("strategy"); it != j.end()) {
        const json& js = *it;
        std::string mode = js.value("reaction_mode", "full_indirect");
        if (mode == "direct")
            sc.rs.mode = ReactionSetConfig::Mode::Direct;
        else if (mode == "full_indirect")
            sc.rs.mode = ReactionSetConfig::Mode::FullIndirect;
        else if (mode == "custom")
            sc.rs.mode = ReactionSetConfig::Mode::Custom;
        else
            bad("strategy.reaction_mode", "expected direct, full_indirect, or custom");
        if (auto jt = js.find("tau"); jt != js.end()) {
            if (jt->is_string()) {
                if (jt->get<std::string>() != "grim") bad("strategy.tau", "expected an integer or \"grim\"");
                grim = true;
            } else {
                tau = as_int(*jt, "strategy.tau");
                if (tau < 1) bad("strategy.tau", "must be >= 1");
            }
        }
        coordinated = js.value("coordinated", coordinated);
        if (auto jc = js.find("custom_reaction_sets"); jc != js.end()) {
            for (std::size_t k = 0; k < jc->size(); ++k) {
                const json& entry = (*jc)[k];
                std::string path = "strategy.custom_reaction_sets[" + std::to_string(k) + "]";
                NodeId accused = as_int(require(entry, "accused", path), path + ".accused");
                NodeId victim = as_int(require(entry, "victim", path), path + ".victim");
                std::set<NodeId> members{accused, victim};
                for (const json& m : require(entry, "set", path))
                    members.insert(as_int(m, path + ".set"));
                sc.rs.custom_sets[{accused, victim}] = std::move(members);
            }
        }
    }

    // --- analysis ---
    if (auto it = j.find("analysis"); it != j.end()) {
        const json& ja = *it;
        sc.options.history_depth = ja.value("history_depth", sc.options.history_depth);
        if (ja.contains("offsets")) {
            sc.options.offsets.clear();
            for (const json& o : ja["offsets"]) {
                int off = as_int(o, "analysis.offsets");
                if (off < 1) bad("analysis.offsets", "offsets must be >= 1");
                sc.options.offsets.push_back(off);
            }
        }
        sc.options.trials = ja.value("trials", sc.options.trials);
        sc.options.seed = ja.value("seed", sc.options.seed);
        sc.options.margin_tolerance = ja.value("margin_tolerance", sc.options.margin_tolerance);
        sc.options.bisect_rel_tolerance =
            ja.value("bisect_rel_tolerance", sc.options.bisect_rel_tolerance);
        sc.options.omega_grid_step = ja.value("omega_grid_step", sc.options.omega_grid_step);
        sc.options.ratio_cap = ja.value("ratio_cap", sc.options.ratio_cap);
        sc.options.caps.exact_nodes = ja.value("exact_cap", sc.options.caps.exact_nodes);
        sc.options.caps.oracle_edges = ja.value("oracle_edge_cap", sc.options.caps.oracle_edges);
    }

    // --- delays and durations ---
    if (is_private) {
        sc.delays = compute_delays(sc.graph, delay_config);
        if (grim)
            sc.durations = DurationPolicy::grim_trigger();
        else if (coordinated)
            sc.durations = coordinated_durations(sc.graph, *sc.delays, tau);
        else
            sc.durations = DurationPolicy::uniform(tau);
    } else {
        sc.durations = grim ? DurationPolicy::grim_trigger() : DurationPolicy::uniform(tau);
    }

    sc.validate();
    return sc;
}

LoadedScenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::InvalidConfig, "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(Errc::InvalidConfig, std::string("config parse error: ") + e.what());
    }
    return LoadedScenario{j, scenario_from_json(j)};
}

std::string canonical_dump(const json& j) { return j.dump(); }

std::string config_digest(const json& j) {
    std::string bytes = canonical_dump(j);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << h;
    return os.str();
}

}  // namespace epigame
