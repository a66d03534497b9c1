#include "pedroute/field.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <queue>
#include <set>

namespace pedroute {

DistanceField::DistanceField(int width, int height, double cell_size, std::string target_id, std::vector<double> values,
                             std::vector<std::uint8_t> reachable, CellMask targets, CellMask blocked)
    : width_(width),
      height_(height),
      cell_size_(cell_size),
      target_id_(std::move(target_id)),
      values_(std::move(values)),
      reachable_(std::move(reachable)),
      targets_(std::move(targets)),
      blocked_(std::move(blocked)) {}

double DistanceField::value(Cell c) const {
  if (!reachable(c))
    throw FieldError("field '" + target_id_ + "': cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                     ") is unreachable");
  return values_[index(c)];
}

std::optional<double> DistanceField::get(Cell c) const {
  if (!reachable(c)) return std::nullopt;
  return values_[index(c)];
}

double DistanceField::max_value() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (reachable_[i]) m = std::max(m, values_[i]);
  return m;
}

std::size_t DistanceField::reachable_count() const {
  return static_cast<std::size_t>(std::count(reachable_.begin(), reachable_.end(), 1));
}

namespace {

enum class State : std::uint8_t { Far, Trial, Known, Blocked };

constexpr int kExactRadius = 8;  // cells

struct HeapEntry {
  double value;
  std::size_t idx;
  bool operator>(const HeapEntry& o) const { return value != o.value ? value > o.value : idx > o.idx; }
};

// Upwind update from the smallest known neighbor on each axis.
double solve_eikonal(double a, double b, double h) {
  if (a > b) std::swap(a, b);
  if (!std::isfinite(b) || b - a >= h) return a + h;
  const double diff = a - b;
  return 0.5 * (a + b + std::sqrt(2.0 * h * h - diff * diff));
}

}  // namespace

DistanceField compute_field(const Scenario& s, std::span<const Cell> targets, const CellMask& blocked_extra,
                            std::string target_id) {
  if (targets.empty()) throw FieldError("compute_field: empty target set");
  const int w = s.width();
  const int h = s.height();
  const std::size_t n = s.cell_count();
  const double cell = s.cell_size();

  CellMask blocked = s.obstacle_mask();
  if (!blocked_extra.empty()) blocked |= blocked_extra;

  std::vector<State> state(n, State::Far);
  for (std::size_t i = 0; i < n; ++i)
    if (blocked.test(s.cell_at(i))) state[i] = State::Blocked;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> value(n, kInf);
  CellMask target_mask(w, h);
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
  bool any = false;
  for (Cell c : targets) {
    if (!s.in_bounds(c)) throw FieldError("compute_field: target cell outside the grid");
    if (blocked.test(c)) continue;
    const std::size_t i = s.index(c);
    if (state[i] == State::Known) continue;
    state[i] = State::Known;
    value[i] = 0.0;
    target_mask.set(c);
    any = true;
  }
  if (!any) throw FieldError("compute_field: all target cells are blocked");

  auto axis_min = [&](int x, int y, int dx, int dy) {
    double best = kInf;
    for (int sgn : {-1, 1}) {
      const int nx = x + sgn * dx, ny = y + sgn * dy;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
      if (state[j] == State::Known) best = std::min(best, value[j]);
    }
    return best;
  };
  auto relax_neighbors = [&](std::size_t i) {
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    constexpr std::array<std::array<int, 2>, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    for (const auto& d : kSteps) {
      const int nx = x + d[0], ny = y + d[1];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
      if (state[j] == State::Known || state[j] == State::Blocked) continue;
      const double t = solve_eikonal(axis_min(nx, ny, 1, 0), axis_min(nx, ny, 0, 1), cell);
      if (t < value[j]) {
        value[j] = t;
        state[j] = State::Trial;
        heap.push({t, j});
      }
    }
  };

  // Cells near the target that see a target cell along a straight line start
  // at their exact Euclidean distance. The first-order scheme is worst around
  // small targets and target corners, where the front is strongly curved.
  auto free_cell = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < w && y < h && state[static_cast<std::size_t>(y) * w + x] != State::Blocked;
  };
  auto visible = [&](Cell a, Cell b) {
    const int steps = 4 * std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
    for (int k = 1; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const int x = static_cast<int>(std::floor(a.x + 0.5 + t * (b.x - a.x)));
      const int y = static_cast<int>(std::floor(a.y + 0.5 + t * (b.y - a.y)));
      if (!free_cell(x, y)) return false;
    }
    return true;
  };
  std::vector<std::size_t> seeded;
  for (std::size_t i = 0; i < n; ++i) {
    if (!target_mask.test(s.cell_at(i))) continue;
    const Cell t = s.cell_at(i);
    for (int dy = -kExactRadius; dy <= kExactRadius; ++dy)
      for (int dx = -kExactRadius; dx <= kExactRadius; ++dx) {
        const double r = std::hypot(dx, dy);
        if (r > kExactRadius || !free_cell(t.x + dx, t.y + dy)) continue;
        const Cell c{t.x + dx, t.y + dy};
        const std::size_t j = s.index(c);
        if (target_mask.test(c) || r * cell >= value[j] || !visible(t, c)) continue;
        if (!std::isfinite(value[j])) seeded.push_back(j);
        value[j] = r * cell;
      }
  }
  for (std::size_t j : seeded) state[j] = State::Known;

  for (std::size_t i = 0; i < n; ++i)
    if (state[i] == State::Known) relax_neighbors(i);
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    if (state[top.idx] == State::Known || top.value > value[top.idx]) continue;
    state[top.idx] = State::Known;
    relax_neighbors(top.idx);
  }

  std::vector<std::uint8_t> reachable(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] == State::Known) {
      reachable[i] = 1;
    } else {
      value[i] = 0.0;
    }
  }
  return DistanceField(w, h, cell, std::move(target_id), std::move(value), std::move(reachable), std::move(target_mask),
                       std::move(blocked));
}

Vec2 gradient_at(const DistanceField& f, Cell c) {
  if (!f.reachable(c)) throw FieldError("gradient_at: cell is unreachable");
  if (f.is_target(c)) return {};
  const double here = f.value(c);

  // Derivative along one axis, or nullopt when neither neighbor is usable.
  auto axis = [&](int dx, int dy) -> std::optional<double> {
    const auto plus = f.get({c.x + dx, c.y + dy});
    const auto minus = f.get({c.x - dx, c.y - dy});
    if (plus && minus) return (*plus - *minus) / 2.0;
    if (plus) return *plus - here;
    if (minus) return here - *minus;
    return std::nullopt;
  };
  const auto gx = axis(1, 0);
  const auto gy = axis(0, 1);
  if (gx || gy) {
    const Vec2 g{-gx.value_or(0.0), -gy.value_or(0.0)};
    const double len = g.norm();
    if (len > 0.0) return g * (1.0 / len);
  }

  Vec2 best{};
  double best_value = here;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const auto v = f.get({c.x + dx, c.y + dy});
      if (v && *v < best_value) {
        best_value = *v;
        best = {static_cast<double>(dx), static_cast<double>(dy)};
      }
    }
  }
  const double len = best.norm();
  return len > 0.0 ? best * (1.0 / len) : Vec2{};
}

BandMap::BandMap(int width, int height, double band_width, std::vector<int> indices)
    : width_(width), height_(height), band_width_(band_width), indices_(std::move(indices)) {}

std::optional<int> BandMap::at(Cell c) const {
  if (!reachable(c)) return std::nullopt;
  return indices_[index(c)];
}

std::size_t BandMap::distinct_bands() const {
  std::set<int> seen;
  for (int v : indices_)
    if (v != kNone) seen.insert(v);
  return seen.size();
}

BandMap band(const DistanceField& f, double band_width) {
  if (!(band_width > 0.0)) throw FieldError("band: band width must be positive");
  std::vector<int> idx(static_cast<std::size_t>(f.width()) * f.height(), -1);
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      if (const auto v = f.get({x, y})) idx[static_cast<std::size_t>(y) * f.width() + x] = static_cast<int>(std::floor(*v / band_width));
  return BandMap(f.width(), f.height(), band_width, std::move(idx));
}

std::span<const double> detour_angles() {
  static constexpr double kDeg = std::numbers::pi / 180.0;
  static constexpr std::array<double, 13> kAngles{0.0,        15 * kDeg, -15 * kDeg, 30 * kDeg, -30 * kDeg,
                                                  45 * kDeg,  -45 * kDeg, 60 * kDeg, -60 * kDeg, 75 * kDeg,
                                                  -75 * kDeg, 90 * kDeg,  -90 * kDeg};
  return kAngles;
}

TracedPath trace_descent(const DistanceField& f, Vec2 start, double step, int max_steps) {
  TracedPath out;
  Vec2 p = start;
  out.points.push_back(p);
  for (int i = 0; i < max_steps; ++i) {
    const Cell c = cell_of(p, f.cell_size());
    if (!f.reachable(c)) {
      out.entered_blocked = true;
      return out;
    }
    if (f.is_target(c)) {
      out.reached_target = true;
      return out;
    }
    const Vec2 dir = gradient_at(f, c);
    bool moved = false;
    for (double a : detour_angles()) {
      const Vec2 q = p + dir.rotated(a) * step;
      if (f.reachable(cell_of(q, f.cell_size()))) {
        p = q;
        moved = true;
        break;
      }
    }
    if (!moved) return out;
    out.points.push_back(p);
  }
  out.reached_target = f.is_target(cell_of(p, f.cell_size()));
  return out;
}

}  // namespace pedroute
