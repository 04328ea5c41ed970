#pragma once

#include "pwlcycle/cycles.hpp"

#include <json.hpp>

namespace pwlcycle {

// Finite values as numbers, everything else as null.
nlohmann::json json_number(double v);

nlohmann::json to_json(const SewingVerdict& v);
nlohmann::json to_json(const CanonicalParams& p);
nlohmann::json to_json(const HalfMapSpec& s);
nlohmann::json to_json(const CycleInvariants& inv);
nlohmann::json to_json(const LimitCycleReport& c);
nlohmann::json to_json(const AnalysisReport& r);

} // namespace pwlcycle
