#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pedroute {

/// Integer grid coordinate. x is the column, y the row; row 0 is the top.
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class CellKind : std::uint8_t { Walkable, Obstacle };

enum class AreaRole { Origin, Destination };

struct Area {
  std::string id;
  char symbol = '?';
  AreaRole role = AreaRole::Origin;
  std::vector<Cell> cells;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense boolean overlay on a grid. Used for obstacle unions, virtual masks
/// and area membership tests.
class CellMask {
 public:
  CellMask() = default;
  CellMask(int width, int height) : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  bool test(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_ && bits_[index(c)] != 0;
  }
  void set(Cell c, bool on = true) { bits_[index(c)] = on ? 1 : 0; }

  std::size_t count() const;
  /// In-place union; both masks must share dimensions (an empty mask is a no-op).
  CellMask& operator|=(const CellMask& other);

  static CellMask from_cells(int width, int height, std::span<const Cell> cells);

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Rasterized walking geometry. Immutable once built.
class Scenario {
 public:
  static constexpr double kDefaultCellSize = 0.15;

  Scenario(int width, int height, double cell_size, std::vector<CellKind> kinds, std::vector<Area> areas);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const std::vector<Area>& areas() const { return areas_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  CellKind kind(Cell c) const { return kinds_[index(c)]; }
  bool walkable(Cell c) const { return in_bounds(c) && kinds_[index(c)] == CellKind::Walkable; }
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell cell_at(std::size_t idx) const { return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)}; }
  std::size_t cell_count() const { return kinds_.size(); }

  /// Throws ScenarioError if no area carries this id.
  const Area& area(std::string_view id) const;
  const Area* find_area(std::string_view id) const;
  std::vector<const Area*> areas_with_role(AreaRole role) const;

  CellMask obstacle_mask() const;

 private:
  int width_;
  int height_;
  double cell_size_;
  std::vector<CellKind> kinds_;
  std::vector<Area> areas_;
};

/// Parses the JSON scenario document: {"cell_size_m", "rows", "legend"}.
/// '#' marks an obstacle, '.' walkable space, any legend character a walkable
/// cell of that area. Throws ScenarioError on malformed input.
Scenario parse_scenario(std::string_view document);
Scenario load_scenario(const std::string& path);

/// Inverse of parse_scenario. Areas must not overlap.
std::string serialize_scenario(const Scenario& s);

/// Returns one description per violated invariant; empty when valid.
std::vector<std::string> validate(const Scenario& s);

/// 4-connected flood fill over walkable cells starting from `seeds`.
CellMask flood_fill(const Scenario& s, std::span<const Cell> seeds);

}  // namespace pedroute
