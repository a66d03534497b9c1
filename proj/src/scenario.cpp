#include "pedroute/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pedroute {

using nlohmann::json;

std::size_t CellMask::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

CellMask& CellMask::operator|=(const CellMask& other) {
  if (other.empty()) return *this;
  if (empty()) {
    *this = other;
    return *this;
  }
  if (other.width_ != width_ || other.height_ != height_) throw std::invalid_argument("CellMask union: size mismatch");
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
  return *this;
}

CellMask CellMask::from_cells(int width, int height, std::span<const Cell> cells) {
  CellMask m(width, height);
  for (Cell c : cells) m.set(c);
  return m;
}

Scenario::Scenario(int width, int height, double cell_size, std::vector<CellKind> kinds, std::vector<Area> areas)
    : width_(width), height_(height), cell_size_(cell_size), kinds_(std::move(kinds)), areas_(std::move(areas)) {
  if (width_ <= 0 || height_ <= 0) throw ScenarioError("scenario: grid must have positive dimensions");
  if (kinds_.size() != static_cast<std::size_t>(width_) * height_)
    throw ScenarioError("scenario: kind grid does not match width x height");
  for (const auto& a : areas_)
    for (Cell c : a.cells)
      if (!in_bounds(c)) throw ScenarioError("scenario: area '" + a.id + "' has a cell outside the grid");
}

const Area* Scenario::find_area(std::string_view id) const {
  for (const auto& a : areas_)
    if (a.id == id) return &a;
  return nullptr;
}

const Area& Scenario::area(std::string_view id) const {
  if (const Area* a = find_area(id)) return *a;
  throw ScenarioError("unknown area '" + std::string(id) + "'");
}

std::vector<const Area*> Scenario::areas_with_role(AreaRole role) const {
  std::vector<const Area*> out;
  for (const auto& a : areas_)
    if (a.role == role) out.push_back(&a);
  return out;
}

CellMask Scenario::obstacle_mask() const {
  CellMask m(width_, height_);
  for (std::size_t i = 0; i < kinds_.size(); ++i)
    if (kinds_[i] == CellKind::Obstacle) m.set(cell_at(i));
  return m;
}

namespace {

AreaRole parse_role(const std::string& role, char symbol) {
  if (role == "origin") return AreaRole::Origin;
  if (role == "destination") return AreaRole::Destination;
  throw ScenarioError(std::string("legend '") + symbol + "': role must be \"origin\" or \"destination\", got \"" + role +
                      "\"");
}

}  // namespace

Scenario parse_scenario(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("malformed document: top level must be an object");
  if (!doc.contains("rows") || !doc["rows"].is_array()) throw ScenarioError("malformed document: missing \"rows\" array");
  if (!doc.contains("legend") || !doc["legend"].is_object())
    throw ScenarioError("malformed document: missing \"legend\" object");

  double cell_size = Scenario::kDefaultCellSize;
  if (doc.contains("cell_size_m")) {
    if (!doc["cell_size_m"].is_number()) throw ScenarioError("malformed document: \"cell_size_m\" must be a number");
    cell_size = doc["cell_size_m"].get<double>();
  }

  std::vector<std::string> rows;
  for (const auto& r : doc["rows"]) {
    if (!r.is_string()) throw ScenarioError("malformed document: rows must be strings");
    rows.push_back(r.get<std::string>());
  }
  if (rows.empty()) throw ScenarioError("malformed document: no rows");
  const std::size_t width = rows.front().size();
  for (std::size_t y = 0; y < rows.size(); ++y)
    if (rows[y].size() != width)
      throw ScenarioError("ragged rows: row " + std::to_string(y) + " has " + std::to_string(rows[y].size()) +
                          " characters, expected " + std::to_string(width));

  // Legend order follows the JSON object's key order (lexicographic in
  // nlohmann::json), which keeps area order stable across round trips.
  std::map<char, std::size_t> area_of_symbol;
  std::vector<Area> areas;
  for (const auto& [key, entry] : doc["legend"].items()) {
    if (key.size() != 1) throw ScenarioError("legend key \"" + key + "\" must be a single character");
    const char sym = key[0];
    if (sym == '#' || sym == '.') throw ScenarioError(std::string("legend key '") + sym + "' is reserved");
    if (!entry.is_object() || !entry.contains("role") || !entry["role"].is_string())
      throw ScenarioError(std::string("legend '") + sym + "': entry needs a string \"role\"");
    Area a;
    a.symbol = sym;
    a.id = entry.contains("name") ? entry["name"].get<std::string>() : std::string(1, sym);
    a.role = parse_role(entry["role"].get<std::string>(), sym);
    area_of_symbol[sym] = areas.size();
    areas.push_back(std::move(a));
  }
  std::set<std::string> ids;
  for (const auto& a : areas)
    if (!ids.insert(a.id).second) throw ScenarioError("duplicate area id '" + a.id + "'");

  const int w = static_cast<int>(width);
  const int h = static_cast<int>(rows.size());
  std::vector<CellKind> kinds(static_cast<std::size_t>(w) * h, CellKind::Walkable);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const char ch = rows[y][x];
      if (ch == '#') {
        kinds[static_cast<std::size_t>(y) * w + x] = CellKind::Obstacle;
      } else if (ch != '.') {
        auto it = area_of_symbol.find(ch);
        if (it == area_of_symbol.end())
          throw ScenarioError(std::string("unknown legend character '") + ch + "' at (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
        areas[it->second].cells.push_back({x, y});
      }
    }
  }
  for (const auto& a : areas)
    if (a.cells.empty()) throw ScenarioError(std::string("zero-area legend entry '") + a.symbol + "'");

  return Scenario(w, h, cell_size, std::move(kinds), std::move(areas));
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::vector<std::string> rows(s.height(), std::string(s.width(), '.'));
  for (int y = 0; y < s.height(); ++y)
    for (int x = 0; x < s.width(); ++x)
      if (s.kind({x, y}) == CellKind::Obstacle) rows[y][x] = '#';
  json legend = json::object();
  for (const auto& a : s.areas()) {
    for (Cell c : a.cells) {
      if (rows[c.y][c.x] != '.') throw ScenarioError("serialize: area '" + a.id + "' overlaps another cell class");
      rows[c.y][c.x] = a.symbol;
    }
    json entry{{"role", a.role == AreaRole::Origin ? "origin" : "destination"}};
    if (a.id != std::string(1, a.symbol)) entry["name"] = a.id;
    legend[std::string(1, a.symbol)] = entry;
  }
  json doc{{"cell_size_m", s.cell_size()}, {"rows", rows}, {"legend", legend}};
  return doc.dump(2);
}

CellMask flood_fill(const Scenario& s, std::span<const Cell> seeds) {
  CellMask seen(s.width(), s.height());
  std::queue<Cell> q;
  for (Cell c : seeds) {
    if (s.walkable(c) && !seen.test(c)) {
      seen.set(c);
      q.push(c);
    }
  }
  constexpr Cell kSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop();
    for (Cell d : kSteps) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (s.walkable(n) && !seen.test(n)) {
        seen.set(n);
        q.push(n);
      }
    }
  }
  return seen;
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> out;
  if (s.width() < 3 || s.height() < 3) out.push_back("grid smaller than 3x3");
  if (!(s.cell_size() > 0.0)) out.push_back("cell_size must be positive");

  const auto origins = s.areas_with_role(AreaRole::Origin);
  const auto destinations = s.areas_with_role(AreaRole::Destination);
  if (origins.empty()) out.push_back("no origin area");
  if (destinations.empty()) out.push_back("no destination area");

  CellMask claimed(s.width(), s.height());
  for (const auto& a : s.areas()) {
    if (a.cells.empty()) out.push_back("area '" + a.id + "' is empty");
    bool on_obstacle = false;
    bool overlaps = false;
    for (Cell c : a.cells) {
      if (!s.walkable(c)) on_obstacle = true;
      if (claimed.test(c)) overlaps = true;
    }
    for (Cell c : a.cells) claimed.set(c);
    if (on_obstacle) out.push_back("area on obstacle: '" + a.id + "'");
    if (overlaps) out.push_back("overlapping areas: '" + a.id + "'");
  }

  for (const Area* o : origins) {
    if (o->cells.empty()) continue;
    const Cell seed[1] = {o->cells.front()};
    const CellMask reach = flood_fill(s, seed);
    for (const Area* d : destinations) {
      const bool all = std::all_of(d->cells.begin(), d->cells.end(), [&](Cell c) { return reach.test(c); });
      const bool every_origin_cell = std::all_of(o->cells.begin(), o->cells.end(), [&](Cell c) { return reach.test(c); });
      if (!all || !every_origin_cell)
        out.push_back("unreachable destination '" + d->id + "' from origin '" + o->id + "'");
    }
  }
  return out;
}

}  // namespace pedroute
