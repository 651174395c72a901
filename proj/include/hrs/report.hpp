#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hrs/algebra.hpp"
#include "hrs/concentration.hpp"
#include "hrs/config.hpp"
#include "hrs/emergence.hpp"
#include "hrs/experiments.hpp"
#include "hrs/model.hpp"

namespace hrs {

using Json = nlohmann::ordered_json;

Json to_json(const SimConfig& config);
// {"amps": [[re, im] x 4], "concurrence": c, "class": name}, amps in row-major (11, 12, 21, 22).
Json to_json(const EmergentState& state);
Json to_json(const CorrelationRecord& record);
Json to_json(const ChshResult& result);
Json to_json(const RangeScan& scan);
Json to_json(const std::vector<InstantaneityPoint>& points);
Json to_json(const NoSignalingReport& report);
Json to_json(const BellCompareReport& report);
Json to_json(const ConcentrationReport& report);
Json to_json(const CollapseReport& report);
Json to_json(const CommutatorReport& report);

// Shortest text that round-trips the double.
std::string format_number(double v);

std::string correlation_csv(const std::vector<CorrelationRecord>& records);
std::string scan_csv(const RangeScan& scan);
std::string concentration_csv(const ConcentrationReport& report);
std::string instantaneity_csv(const std::vector<InstantaneityPoint>& points);

inline constexpr const char* kTrajectoryHeader = "tau,t,k,particle,x1,x2,x3,v1,v2,v3,n1,n2,phi1,phi2";
// One row per molecule, no trailing header.
std::string trajectory_rows(const Ensemble& ensemble);

}  // namespace hrs
