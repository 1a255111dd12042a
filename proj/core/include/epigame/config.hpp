#pragma once

#include <string>

#include <json.hpp>

#include "epigame/scenario.hpp"

namespace epigame {

// A scenario plus the raw document it came from (kept for digests and
// report provenance).
struct LoadedScenario {
    nlohmann::json raw;
    Scenario scenario;
};

Scenario scenario_from_json(const nlohmann::json& j);
LoadedScenario load_scenario_file(const std::string& path);

// Canonical serialized form: sorted keys, shortest round-trip numbers.
// Identical configs canonicalize to identical bytes.
std::string canonical_dump(const nlohmann::json& j);

// FNV-1a 64 over the canonical form, hex encoded.
std::string config_digest(const nlohmann::json& j);

}  // namespace epigame
