#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedroute/scenario.hpp"

namespace pedroute {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
  bool is_zero() const { return x == 0.0 && y == 0.0; }
  Vec2 rotated(double radians) const {
    const double c = std::cos(radians), s = std::sin(radians);
    return {c * x - s * y, s * x + c * y};
  }
};

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Geodesic distance (meters) from every walkable cell to a target cell set.
/// Cells that are blocked, or cut off from the target, are unreachable; there
/// is no numeric stand-in for them.
class DistanceField {
 public:
  DistanceField(int width, int height, double cell_size, std::string target_id, std::vector<double> values,
                std::vector<std::uint8_t> reachable, CellMask targets, CellMask blocked);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const std::string& target_id() const { return target_id_; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool reachable(Cell c) const { return in_bounds(c) && reachable_[index(c)] != 0; }
  bool is_target(Cell c) const { return targets_.test(c); }
  /// Throws FieldError for unreachable cells.
  double value(Cell c) const;
  std::optional<double> get(Cell c) const;

  /// Obstacles plus any extra cells excluded from the computation.
  const CellMask& blocked() const { return blocked_; }
  const CellMask& targets() const { return targets_; }
  /// Largest reachable value; 0 for a field with only target cells.
  double max_value() const;
  std::size_t reachable_count() const;

 private:
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  int width_;
  int height_;
  double cell_size_;
  std::string target_id_;
  std::vector<double> values_;
  std::vector<std::uint8_t> reachable_;
  CellMask targets_;
  CellMask blocked_;
};

/// First-order Fast Marching solution of |grad T| = 1 over the walkable cells
/// of `s` minus `blocked_extra` (which may be empty). Target cells start at 0.
DistanceField compute_field(const Scenario& s, std::span<const Cell> targets, const CellMask& blocked_extra,
                            std::string target_id = "target");

/// Unit negative-gradient direction at `cell`, in grid axes (x right, y down).
/// Central differences where both axis neighbors are reachable, one-sided
/// differences otherwise, and the direction to the lowest reachable
/// neighbor when neither axis gives a usable difference. Zero on target cells.
Vec2 gradient_at(const DistanceField& f, Cell cell);

/// Floor of value / band width per cell. Unreachable cells carry no index.
class BandMap {
 public:
  BandMap(int width, int height, double band_width, std::vector<int> indices);

  int width() const { return width_; }
  int height() const { return height_; }
  double band_width() const { return band_width_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  std::optional<int> at(Cell c) const;
  bool reachable(Cell c) const { return in_bounds(c) && indices_[index(c)] != kNone; }
  /// Number of distinct band indices present.
  std::size_t distinct_bands() const;

 private:
  static constexpr int kNone = -1;
  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  int width_;
  int height_;
  double band_width_;
  std::vector<int> indices_;
};

BandMap band(const DistanceField& f, double band_width);

/// Continuous position (meters) to the cell containing it.
inline Cell cell_of(Vec2 p, double cell_size) {
  return {static_cast<int>(std::floor(p.x / cell_size)), static_cast<int>(std::floor(p.y / cell_size))};
}
inline Vec2 cell_center(Cell c, double cell_size) { return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size}; }

/// Result of following a field downhill from a start position.
struct TracedPath {
  std::vector<Vec2> points;
  bool reached_target = false;
  bool entered_blocked = false;
};

/// Walks from `start` along gradient_at with fixed step length (meters) until
/// a target cell is reached or `max_steps` elapse. A step landing on a cell
/// that is unreachable in `f` is retried with the direction rotated in 15
/// degree increments up to 90 degrees; if none fits the walk stops.
TracedPath trace_descent(const DistanceField& f, Vec2 start, double step, int max_steps);

/// Candidate rotations tried when a step is obstructed, in order.
std::span<const double> detour_angles();

}  // namespace pedroute
