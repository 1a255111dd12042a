#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "epigame/epidemic.hpp"
#include "epigame/strategy.hpp"

namespace epigame {

// Per-node utility parameters: benefit per received message, cost per
// forwarded message per neighbor, and discount factor.
struct UtilityParams {
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<double> omega;

    static UtilityParams uniform(int n, double beta, double gamma, double omega);
    void validate(int n) const;
};

enum class MonitoringMode { Public, Private };

struct AnalysisOptions {
    int history_depth = 2;            // stacked deviation seeds up to this depth
    std::vector<int> offsets = {1, 2};  // stages evolved past each seed deviation
    double margin_tolerance = 1e-9;
    double bisect_rel_tolerance = 1e-6;
    double omega_grid_step = 1e-3;
    double ratio_cap = 1e6;           // effectiveness search gives up past this
    EpidemicCaps caps{};
    std::uint64_t seed = 42;
    long long trials = 100000;
};

// Everything one analysis run needs: the overlay, the baseline forwarding
// profile, utilities, the monitoring mode, and the punishment parameters.
struct Scenario {
    OverlayGraph graph;
    ForwardProfile baseline;
    UtilityParams params;
    MonitoringMode monitoring = MonitoringMode::Public;
    ReactionSetConfig rs{};
    DurationPolicy durations = DurationPolicy::uniform(1);
    std::optional<DelayMatrix> delays;  // required under private monitoring
    AnalysisOptions options{};

    void validate() const;
    int mdel(NodeId i) const;  // 0 under public monitoring
};

}  // namespace epigame
