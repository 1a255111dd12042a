#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace epigame {

inline const char* kToolVersion = "epigame 0.1.0";
inline const char* kReportSchemaVersion = "1";

// Machine-first report envelope. Identical (config, seed, tool version)
// always produce byte-identical documents: no timestamps, sorted keys.
nlohmann::json make_report(const std::string& command, const nlohmann::json& config,
                           std::uint64_t seed, nlohmann::json results);

std::string render_report(const nlohmann::json& report);

// Minimal CSV table: header row plus data rows, RFC-style quoting.
std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);

}  // namespace epigame
