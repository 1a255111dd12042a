#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epigame/game.hpp"

namespace epigame {

// The finite history family equilibrium checks quantify over: the empty
// history, single-deviation seeds, stacked seeds up to the configured depth,
// and per-node aligned-punishment worst cases. Verdicts are "pass on family".
struct HistoryFamily {
    std::vector<HistorySeed> seeds;

    static HistoryFamily standard(const Scenario& sc);
};

struct MarginEntry {
    std::string history;
    NodeId deviator = 0;
    std::vector<NodeId> dropped;
    double margin = 0.0;
};

struct EquilibriumReport {
    enum class Verdict { Pass, Fail, Inconclusive };

    Verdict verdict = Verdict::Inconclusive;
    std::vector<MarginEntry> margins;       // lexicographic (history, deviator, drop set)
    MarginEntry worst;                      // minimum margin, lexicographic tie-break
    std::map<std::string, double> bounds;
    std::vector<std::optional<double>> min_omega_per_node;  // filled on request
    std::vector<std::string> notes;

    bool passed() const { return verdict == Verdict::Pass; }
};

// Subgame-perfection check under public monitoring: every node, every family
// history, every legal drop set; full drop-set enumeration up to 12 positive
// neighbors, singletons plus the full set beyond that.
EquilibriumReport dc_check(const Scenario& sc, const HistoryFamily& family);

// Sequential-rationality check under private monitoring with point-mass
// beliefs on the deviator's observed defections.
EquilibriumReport pdc_check(const Scenario& sc, const HistoryFamily& family);

// Minimum benefit-to-cost ratio any punishing equilibrium needs:
// max_i of the baseline expected forwarding cost multiplier.
double folk_upper_bound(const Scenario& sc);

// Necessary benefit-to-cost ratio for direct reciprocity on edge (i, j),
// from the exact no-delivery probabilities with and without j punishing i.
double direct_necessary_ratio(const Scenario& sc, NodeId i, NodeId j);

struct IndirectBoundDetail {
    double c = 1.0;          // reliability-drop constant estimated over the family
    bool finite = true;
    std::vector<std::string> notes;
};

// Sufficient benefit-to-cost ratio for full indirect reciprocity under
// public monitoring: max over family histories of pbar_i[h,0] * (1 + c/tau).
double indirect_sufficient_ratio(const Scenario& sc, IndirectBoundDetail* detail = nullptr);

struct PrivateBoundDetail {
    double c = 1.0;
    double epsilon = 0.0;
    double printed_bound = 0.0;     // literal A/B/C right-hand side, for reference
    double simplified_bound = 0.0;  // large-tau form max pbar * (1 + c/(mdel+1))
    bool simplified_valid = false;  // requires tau >= mdel + 1
    bool finite = true;
    std::vector<std::string> notes;
};

// Sufficient benefit-to-cost ratio for coordinated full indirect reciprocity
// under private monitoring. epsilon is the reliability-increase allowance of
// the threshold rule; the constant-baseline rule gives exactly 0.
//
// The returned value corrects the literal A/B/C right-hand side in two ways
// so that it genuinely dominates the empirical threshold: the early-stage
// cost term carries its (mdel+1) factor all the way through, and a deviator
// that the source keeps feeding retains (1 - q) >= p_s even while every
// in-neighbor punishes it, which shrinks the deterrence denominator. The
// literal form is reported alongside.
double private_sufficient_ratio(const Scenario& sc, double epsilon = 0.0,
                                PrivateBoundDetail* detail = nullptr);

// Least discount factor making the given one-shot deviation unprofitable, or
// nullopt when no omega in (0,1) does. Returns 0 when the deviation is
// already unprofitable in its own stage.
std::optional<double> min_omega(const Scenario& sc, NodeId i, const DropDeviation& deviation,
                                const HistorySeed& history);

// Per-node binding minimum omega over the whole family (nullopt when some
// deviation cannot be deterred by any omega).
std::vector<std::optional<double>> solve_min_omega_per_node(const Scenario& sc,
                                                            const HistoryFamily& family);

// Closed-form minimum discount factor for the grim trigger.
double grim_min_omega(const Scenario& sc, NodeId i);

struct EffectivenessResult {
    double threshold = 0.0;                 // least uniform beta/gamma that some omega sustains
    bool attainable = true;
    double folk = 0.0;
    std::optional<double> sufficient;       // bound applicable to the scenario's regime
    std::optional<double> necessary;        // direct-reciprocity necessary bound
    bool sandwich_ok = true;
    std::map<std::string, double> bounds;
    std::vector<std::string> notes;
};

// Bisects the uniform benefit-to-cost ratio (gamma fixed at 1) for the least
// value at which every node admits some omega with all family margins >= 0.
double effectiveness_threshold(const Scenario& sc, const HistoryFamily& family);

// Threshold plus all applicable bounds and the sandwich verdict.
EffectivenessResult effectiveness_analysis(const Scenario& sc);

}  // namespace epigame
