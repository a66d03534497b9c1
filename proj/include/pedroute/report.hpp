#pragma once

#include <string>

#include "json.hpp"

#include "pedroute/assign.hpp"

namespace pedroute {

/// Routes, their legs, shortest-path alignment and intermediate areas.
nlohmann::json routes_json(const Scenario& s, const RouteSet& rs, const std::vector<bool>& aligned);

/// One row per route per iteration; stop_reason is filled on the last row only.
std::string history_csv(const AssignmentHistory& h);

nlohmann::json summary_json(const AssignmentHistory& h);

nlohmann::json sim_result_json(const SimResult& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace pedroute
