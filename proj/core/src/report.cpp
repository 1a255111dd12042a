#include "epigame/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "epigame/config.hpp"
#include "epigame/rng.hpp"

namespace epigame {

using nlohmann::json;

json make_report(const std::string& command, const json& config, std::uint64_t seed, json results) {
    json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = command;
    doc["scenario_digest"] = config_digest(config);
    doc["provenance"] = {{"tool", kToolVersion}, {"prng", kPrngName}, {"seed", seed}};
    doc["results"] = std::move(results);
    return doc;
}

std::string render_report(const json& report) { return report.dump(2) + "\n"; }

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string render_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_escape(header[i]);
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
        os << "\n";
    }
    return os.str();
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);  // shortest round-trip
    return std::string(buf, ptr);
}

}  // namespace epigame
