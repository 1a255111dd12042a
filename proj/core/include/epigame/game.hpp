#pragma once

#include <string>
#include <vector>

#include "epigame/scenario.hpp"

namespace epigame {

struct StageOutcome {
    ForwardProfile profile;       // what was played
    std::vector<double> q;        // per-node non-delivery probability
    std::vector<double> pbar;     // per-node expected forwarding cost multiplier
    std::vector<double> u;        // per-node stage utility
};

struct Trajectory {
    std::vector<StageOutcome> stages;
    std::vector<DefectionEvent> events;
};

// A one-shot deviation: `deviator` plays probability 0 toward each dropped
// neighbor at `at_stage` and follows the punishing strategy afterwards.
struct DropDeviation {
    NodeId deviator = 0;
    std::vector<NodeId> dropped;
    int at_stage = 0;
};

// A reachable history prefix: deviations injected at their stages while all
// other play follows the punishing strategy, evolved for `length` stages.
struct HistorySeed {
    std::vector<DropDeviation> deviations;
    int length = 0;
    std::string label = "empty";
};

double stage_utility(double q_i, double pbar_i, const UtilityParams& params, NodeId i);

// Deterministic evolution of the repeated game for `horizon` stages starting
// from the empty history, with an optional injected deviation.
Trajectory evolve(const Scenario& sc, const std::optional<DropDeviation>& deviation, int horizon);

// Threshold profile and punish state reached after a seed prefix.
ForwardProfile thresholds_after(const Scenario& sc, const HistorySeed& seed);
PunishState state_after(const Scenario& sc, const HistorySeed& seed);

// The seed prefix as believed by `observer` under private monitoring: the
// unique history containing exactly the defections the observer has been
// informed of.  Under public monitoring this is the seed itself.
HistorySeed believed_prefix(const Scenario& sc, const HistorySeed& seed, NodeId observer);

// Per-stage difference between following the punishing strategy and a
// one-shot drop deviation, factored so that stage r contributes
// beta_i * benefit_coeff[r] + gamma_i * cost_coeff[r].  When the two
// continuations become stationary without coinciding (grim trigger), the
// trailing stage repeats forever and is summed as a geometric tail.
struct MarginCase {
    std::string history;
    NodeId deviator = 0;
    std::vector<NodeId> dropped;
    std::vector<double> benefit_coeff;
    std::vector<double> cost_coeff;
    bool has_tail = false;

    double margin(double beta, double gamma, double omega) const;
    // Margin under the scenario's own parameters for this deviator.
    double margin(const UtilityParams& params) const;
};

MarginCase build_margin_case(const Scenario& sc, const HistorySeed& seed,
                             const DropDeviation& deviation, ReliabilityCache& cache);

// Sum over stages of omega^r (u*_r - u'_r), truncated exactly where the two
// continuations provably coincide.
double discounted_difference(const Scenario& sc, const HistorySeed& seed,
                             const DropDeviation& deviation);

// Neighbors the deviator may legally drop after the seed prefix (positive
// threshold under its own view of the history).
std::vector<NodeId> droppable_neighbors(const Scenario& sc, const HistorySeed& seed, NodeId i);

// (q_i, pbar_i) per stage while everyone follows the punishing strategy after
// the seed prefix; stage 0 is the first stage past the prefix.
std::vector<std::pair<double, double>> continuation_stats(const Scenario& sc,
                                                          const HistorySeed& seed, NodeId i,
                                                          int stages, ReliabilityCache& cache);

// (q_i, pbar_i) at a provably stationary stage of the strategy continuation
// after the seed prefix (all accusations delivered and activated; under grim
// trigger the state never changes again, otherwise it is the baseline).
std::pair<double, double> stationary_stats(const Scenario& sc, const HistorySeed& seed, NodeId i,
                                           ReliabilityCache& cache);

}  // namespace epigame
