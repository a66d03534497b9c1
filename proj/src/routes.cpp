#include "pedroute/routes.hpp"

#include <algorithm>
#include <limits>

namespace pedroute {

const IntermediateArea& RouteSet::area(const std::string& id) const {
  for (const auto& a : areas)
    if (a.id == id) return a;
  throw RouteError("unknown intermediate area '" + id + "'");
}

const DistanceField& RouteSet::field(const std::string& target_id) const {
  auto it = fields.find(target_id);
  if (it == fields.end()) throw RouteError("no guidance field for '" + target_id + "'");
  return *it->second;
}

const Route& RouteSet::route(int id) const {
  for (const auto& r : routes)
    if (r.id == id) return r;
  throw RouteError("unknown route " + std::to_string(id));
}

std::vector<int> FieldAnalysis::critical_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == RegionClass::Critical) out.push_back(static_cast<int>(i));
  return out;
}

FieldAnalysis analyze(const Scenario& s, std::span<const Cell> targets, const CellMask& blocked_extra,
                      double band_width, std::string target_id) {
  FieldAnalysis out;
  out.field = std::make_shared<const DistanceField>(compute_field(s, targets, blocked_extra, std::move(target_id)));
  out.graph = extract_regions(band(*out.field, band_width));
  out.classes = classify(out.graph);
  return out;
}

CellMask virtual_mask(const DistanceField& f, const IntermediateArea& a) {
  CellMask m(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      if (const auto v = f.get({x, y}); v && *v < a.front_distance) m.set({x, y});
  return m;
}

namespace {

class RouteBuilder {
 public:
  RouteBuilder(const Scenario& s, const RouteConfig& cfg, RouteSet& out) : s_(s), cfg_(cfg), out_(out) {}

  void expand(std::span<const Cell> targets, const std::string& target_id, const CellMask& mask,
              const std::vector<std::string>& suffix, int depth) {
    FieldAnalysis fa = analyze(s_, targets, mask, cfg_.band_width, target_id);
    out_.fields[target_id] = fa.field;
    if (depth > cfg_.max_depth) return;
    for (int crit : fa.critical_ids()) {
      for (int nb : fa.graph.closer[crit]) {
        const Region& r = fa.graph.regions[nb];
        IntermediateArea ia;
        ia.id = "I" + std::to_string(out_.areas.size() + 1);
        ia.cells = r.cells;
        ia.band_index = r.band_index;
        ia.front_distance = r.front_distance;
        ia.parent_target = target_id;
        ia.depth = depth;

        std::vector<std::string> legs;
        legs.reserve(suffix.size() + 1);
        legs.push_back(ia.id);
        legs.insert(legs.end(), suffix.begin(), suffix.end());
        out_.routes.push_back({static_cast<int>(out_.routes.size()), legs});

        CellMask child_mask = virtual_mask(*fa.field, ia);
        child_mask |= mask;
        const std::string id = ia.id;
        const std::vector<Cell> cells = ia.cells;
        out_.areas.push_back(std::move(ia));
        expand(cells, id, child_mask, legs, depth + 1);
      }
    }
  }

 private:
  const Scenario& s_;
  const RouteConfig& cfg_;
  RouteSet& out_;
};

}  // namespace

RouteSet build_routes(const Scenario& s, const Area& destination, const RouteConfig& cfg) {
  if (!(cfg.band_width > 0.0)) throw RouteError("route config: band width must be positive");
  if (cfg.max_depth < 1) throw RouteError("route config: max_depth must be at least 1");
  if (destination.role != AreaRole::Destination) throw RouteError("area '" + destination.id + "' is not a destination");

  RouteSet rs;
  rs.destination = destination.id;
  rs.config = cfg;
  rs.routes.push_back({0, {}});
  RouteBuilder builder(s, cfg, rs);
  builder.expand(destination.cells, destination.id, CellMask(s.width(), s.height()), {}, 1);

  const DistanceField& root = rs.field(destination.id);
  for (const Area* o : s.areas_with_role(AreaRole::Origin)) {
    const bool any = std::any_of(o->cells.begin(), o->cells.end(), [&](Cell c) { return root.reachable(c); });
    if (!any) throw RouteError("destination '" + destination.id + "' unreachable from origin '" + o->id + "'");
  }
  return rs;
}

FilteredRoutes filter_routes_for_origin(const RouteSet& rs, const Area& origin) {
  FilteredRoutes out;
  out.routes = rs;
  out.routes.routes.clear();
  for (const Route& r : rs.routes) {
    if (r.legs.empty()) {
      out.routes.routes.push_back(r);
      continue;
    }
    const IntermediateArea& first = rs.area(r.legs.front());
    const DistanceField& parent = rs.parent_field(first);
    const DistanceField& guide = rs.field(first.id);
    bool keep = true;
    for (Cell c : origin.cells) {
      const auto v = parent.get(c);
      if (!v || !guide.reachable(c)) {
        out.warnings.push_back("route " + std::to_string(r.id) + ": origin '" + origin.id + "' unreachable in field of '" +
                               (v ? first.id : first.parent_target) + "'");
        keep = false;
        break;
      }
      if (*v < first.front_distance) {
        keep = false;
        break;
      }
    }
    if (keep) out.routes.routes.push_back(r);
  }
  return out;
}

std::vector<Vec2> trace_route(const RouteSet& rs, const Route& r, Vec2 start, double step, int max_steps_per_leg) {
  std::vector<Vec2> path{start};
  Vec2 p = start;
  for (std::size_t leg = 0; leg <= r.legs.size(); ++leg) {
    const DistanceField& f = rs.field(rs.leg_target(r, leg));
    const TracedPath t = trace_descent(f, p, step, max_steps_per_leg);
    path.insert(path.end(), t.points.begin() + 1, t.points.end());
    if (!t.reached_target) break;
    p = t.points.back();
  }
  return path;
}

std::vector<bool> shortest_path_aligned(const RouteSet& rs, Vec2 start) {
  const DistanceField& root = rs.field(rs.destination);
  const double cs = root.cell_size();
  const auto path = trace_descent(root, start, 0.25 * cs, 1000000).points;
  CellMask on_path(root.width(), root.height());
  for (Vec2 p : path) on_path.set(cell_of(p, cs));

  std::vector<bool> out;
  for (const Route& r : rs.routes) {
    bool aligned = true;
    for (const auto& leg : r.legs) {
      const auto& cells = rs.area(leg).cells;
      if (std::none_of(cells.begin(), cells.end(), [&](Cell c) { return on_path.test(c); })) {
        aligned = false;
        break;
      }
    }
    out.push_back(aligned);
  }
  return out;
}

Vec2 area_anchor(const Area& a, double cell_size) {
  double cx = 0.0, cy = 0.0;
  for (Cell c : a.cells) {
    cx += c.x;
    cy += c.y;
  }
  cx /= static_cast<double>(a.cells.size());
  cy /= static_cast<double>(a.cells.size());
  Cell best = a.cells.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (Cell c : a.cells) {
    const double d = (c.x - cx) * (c.x - cx) + (c.y - cy) * (c.y - cy);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return cell_center(best, cell_size);
}

}  // namespace pedroute
