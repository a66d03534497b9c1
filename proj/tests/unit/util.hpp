#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pedroute/scenario.hpp"

namespace testutil {

inline std::string doc(const std::vector<std::string>& rows, double cell = 0.15) {
  nlohmann::json j{{"cell_size_m", cell},
                   {"rows", rows},
                   {"legend", {{"o", {{"role", "origin"}}}, {"d", {{"role", "destination"}}}}}};
  return j.dump();
}

inline pedroute::Scenario grid(const std::vector<std::string>& rows, double cell = 0.15) {
  return pedroute::parse_scenario(doc(rows, cell));
}

/// Open rectangle with an origin column on the left and a destination
/// column on the right.
inline pedroute::Scenario open_room(int w, int h, double cell = 0.15) {
  std::vector<std::string> rows(h, std::string(w, '.'));
  for (auto& r : rows) {
    r.front() = 'o';
    r.back() = 'd';
  }
  return grid(rows, cell);
}

inline std::string scenario_path(const std::string& name) {
  return std::string(PEDROUTE_SCENARIO_DIR) + "/" + name + ".json";
}

inline const std::vector<std::string>& bundled() {
  static const std::vector<std::string> names{"single_obstacle", "two_obstacles",  "nested_loops", "example_network",
                                              "two_corridors",   "offset_obstacle", "two_origins"};
  return names;
}

}  // namespace testutil
