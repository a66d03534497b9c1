#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pedroute/field.hpp"
#include "pedroute/regions.hpp"

namespace pedroute {

struct RouteConfig {
  double band_width = 4.0;  // meters
  int max_depth = 4;
};

/// A closer-neighbor region of a critical region, promoted to a waypoint.
struct IntermediateArea {
  std::string id;
  std::vector<Cell> cells;
  int band_index = 0;
  double front_distance = 0.0;
  /// Final destination id or the id of another intermediate area.
  std::string parent_target;
  int depth = 1;
};

/// Ordered intermediate area ids; the final destination is implied after the
/// last leg. The direct route has no legs.
struct Route {
  int id = 0;
  std::vector<std::string> legs;
};

class RouteSet {
 public:
  std::string destination;
  RouteConfig config;
  std::vector<IntermediateArea> areas;
  std::vector<Route> routes;
  /// Guidance field per target id (the destination and every area). Each
  /// field was computed with the virtual obstacles in force for its target.
  std::map<std::string, std::shared_ptr<const DistanceField>> fields;

  const IntermediateArea& area(const std::string& id) const;
  const DistanceField& field(const std::string& target_id) const;
  /// Field of the target an area was cut from.
  const DistanceField& parent_field(const IntermediateArea& a) const { return field(a.parent_target); }
  /// Target walked toward on leg `leg` of `r` (the destination past the last leg).
  const std::string& leg_target(const Route& r, std::size_t leg) const {
    return leg < r.legs.size() ? r.legs[leg] : destination;
  }
  const Route& route(int id) const;
};

class RouteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field, bands, regions and classes for one target.
struct FieldAnalysis {
  std::shared_ptr<const DistanceField> field;
  RegionGraph graph;
  std::vector<RegionClass> classes;

  std::vector<int> critical_ids() const;
};

FieldAnalysis analyze(const Scenario& s, std::span<const Cell> targets, const CellMask& blocked_extra,
                      double band_width, std::string target_id);

/// Cells of `f` that are strictly closer to its target than the front of `a`.
CellMask virtual_mask(const DistanceField& f, const IntermediateArea& a);

/// Recursive intermediate-destination generation for one destination.
/// Routes are numbered in depth-first discovery order with the direct route
/// first (id 0).
RouteSet build_routes(const Scenario& s, const Area& destination, const RouteConfig& cfg);

struct FilteredRoutes {
  RouteSet routes;
  std::vector<std::string> warnings;
};

/// Drops routes whose first intermediate area lies upstream of some origin
/// cell (pedestrians would approach it from behind) or whose first leg cannot
/// be reached from the origin. Route ids are preserved.
FilteredRoutes filter_routes_for_origin(const RouteSet& rs, const Area& origin);

/// Polyline an agent starting at `start` would walk along route `r` with
/// no other pedestrians present.
std::vector<Vec2> trace_route(const RouteSet& rs, const Route& r, Vec2 start, double step, int max_steps_per_leg = 100000);

/// Marks routes whose every intermediate area touches the direct route's
/// path from `start`, i.e. routes that do not deviate from the shortest path.
std::vector<bool> shortest_path_aligned(const RouteSet& rs, Vec2 start);

/// Representative start point of an area: the area cell nearest its centroid.
Vec2 area_anchor(const Area& a, double cell_size);

}  // namespace pedroute
