#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle.hpp"
#include "pedroute/field.hpp"
#include "util.hpp"

using namespace pedroute;

namespace {

Scenario empty_map(int n) {
  std::vector<std::string> rows(n, std::string(n, '.'));
  rows[0][0] = 'o';
  rows[n - 1][n - 1] = 'd';
  return testutil::grid(rows, 1.0);
}

DistanceField to_destination(const Scenario& s) {
  const Area& d = *s.areas_with_role(AreaRole::Destination).front();
  return compute_field(s, d.cells, CellMask{}, d.id);
}

}  // namespace

TEST_CASE("obstacle-free field matches Euclidean distance") {
  const Scenario s = empty_map(101);
  const Cell target[1] = {{0, 0}};
  const DistanceField f = compute_field(s, target, CellMask{});
  CHECK(f.value({0, 0}) == 0.0);
  CHECK(f.value({30, 0}) == doctest::Approx(30.0));
  CHECK(f.value({30, 40}) == doctest::Approx(50.0).epsilon(0.02));
  double worst = 0.0;
  for (int y = 0; y < 101; ++y)
    for (int x = 0; x < 101; ++x) {
      const double r = std::hypot(x, y);
      if (r > 5.0) worst = std::max(worst, std::abs(f.value({x, y}) - r) / r);
    }
  CHECK(worst <= 0.02);
}

TEST_CASE("field scales with cell size") {
  std::vector<std::string> rows(21, std::string(21, '.'));
  rows[0][0] = 'o';
  rows[10][10] = 'd';
  const DistanceField a = to_destination(testutil::grid(rows, 1.0));
  const DistanceField b = to_destination(testutil::grid(rows, 0.25));
  CHECK(b.value({0, 10}) == doctest::Approx(a.value({0, 10}) * 0.25));
  CHECK(b.value({3, 17}) == doctest::Approx(a.value({3, 17}) * 0.25));
}

TEST_CASE("16-neighbor oracle agrees within 3 percent on every bundled map") {
  for (const auto& name : testutil::bundled()) {
    CAPTURE(name);
    const Scenario s = load_scenario(testutil::scenario_path(name));
    const Area& d = *s.areas_with_role(AreaRole::Destination).front();
    const DistanceField f = compute_field(s, d.cells, CellMask{}, d.id);
    const auto ref = oracle::dijkstra(s, d.cells, CellMask{}, 16);
    const auto cmp = oracle::compare(f, ref, 5 * s.cell_size());
    CHECK(cmp.reach_mismatch == 0);
    CHECK(cmp.compared > 0);
    CHECK(cmp.max_relative <= 0.03);
  }
}

TEST_CASE("4-neighbor path length bounds the field from above, straight line from below") {
  const Scenario s = testutil::grid({"o.........", "..........", "...####...", "...####...", "..........",
                                     ".........d"},
                                    1.0);
  const DistanceField f = to_destination(s);
  const auto manhattan = oracle::dijkstra(s, s.area("d").cells, CellMask{}, 4);
  for (int y = 0; y < s.height(); ++y)
    for (int x = 0; x < s.width(); ++x) {
      if (!s.walkable({x, y})) continue;
      const double v = f.value({x, y});
      CHECK(v <= manhattan[s.index({x, y})] + 1e-9);
      CHECK(v >= std::hypot(9 - x, 5 - y) - 1e-9);
    }
}

TEST_CASE("cells cut off from the target are unreachable, not a large number") {
  const Scenario s = testutil::grid({"o..#...", "...#...", "...#..d"}, 1.0);
  const DistanceField f = to_destination(s);
  CHECK_FALSE(f.reachable({0, 0}));
  CHECK_FALSE(f.get({1, 1}).has_value());
  CHECK_THROWS_AS(f.value({1, 1}), FieldError);
  CHECK(f.reachable({4, 0}));
  CHECK(f.reachable_count() == 9);
}

TEST_CASE("extra blocked cells act as obstacles") {
  const Scenario s = testutil::open_room(10, 5, 1.0);
  CellMask wall(10, 5);
  for (int y = 0; y < 4; ++y) wall.set({5, y});
  const DistanceField plain = to_destination(s);
  const auto& d = s.area("d");
  const DistanceField masked = compute_field(s, d.cells, wall, "d");
  CHECK_FALSE(masked.reachable({5, 0}));
  CHECK(masked.value({0, 0}) > plain.value({0, 0}) + 1.0);
  CHECK(masked.blocked().test({5, 2}));
  CHECK_THROWS_AS(compute_field(s, std::span<const Cell>{}, CellMask{}), FieldError);
}

TEST_CASE("gradient points downhill") {
  const Scenario s = testutil::open_room(20, 9, 1.0);
  const DistanceField f = to_destination(s);
  const Vec2 g = gradient_at(f, {5, 4});
  CHECK(g.x == doctest::Approx(1.0));
  CHECK(g.y == doctest::Approx(0.0));
  CHECK(gradient_at(f, {19, 4}).is_zero());
  // Mirror image: destination on the left.
  std::vector<std::string> rows(9, std::string(20, '.'));
  for (auto& r : rows) {
    r.front() = 'd';
    r.back() = 'o';
  }
  const DistanceField m = to_destination(testutil::grid(rows, 1.0));
  CHECK(gradient_at(m, {10, 4}).x == doctest::Approx(-1.0));
  const Vec2 edge = gradient_at(m, {10, 0});
  CHECK(edge.norm() == doctest::Approx(1.0));
  CHECK(edge.x < -0.99);
}

TEST_CASE("band index is floor of value over width") {
  const Scenario s = testutil::grid({"d.......o"}, 1.0);
  const DistanceField f = to_destination(s);
  const BandMap b = band(f, 3.0);
  CHECK(*b.at({0, 0}) == 0);
  CHECK(*b.at({2, 0}) == 0);
  CHECK(*b.at({3, 0}) == 1);
  CHECK(*b.at({6, 0}) == 2);
  CHECK(b.distinct_bands() == 3);
  CHECK_THROWS_AS(band(f, 0.0), FieldError);
  CHECK_THROWS_AS(band(f, -1.0), FieldError);
}

TEST_CASE("band boundary cases") {
  // Values exactly at a multiple belong to the farther band.
  const Scenario s = testutil::grid({"d......o"}, 1.0);
  const DistanceField f = to_destination(s);
  CHECK(*band(f, 6.0).at({6, 0}) == 1);
  CHECK(*band(f, 6.001).at({6, 0}) == 0);
  CHECK(*band(f, 5.999).at({6, 0}) == 1);
}

TEST_CASE("doubling the band width halves the band count") {
  const Scenario s = load_scenario(testutil::scenario_path("single_obstacle"));
  const DistanceField f = to_destination(s);
  const auto n1 = static_cast<double>(band(f, 1.0).distinct_bands());
  const auto n2 = static_cast<double>(band(f, 2.0).distinct_bands());
  CHECK(std::abs(n1 / 2.0 - n2) <= 1.0);
}

TEST_CASE("band partition covers the reachable set") {
  for (const auto& name : testutil::bundled()) {
    const Scenario s = load_scenario(testutil::scenario_path(name));
    const DistanceField f = to_destination(s);
    const BandMap b = band(f, 4.0);
    std::size_t covered = 0;
    for (int y = 0; y < s.height(); ++y)
      for (int x = 0; x < s.width(); ++x) {
        CHECK(b.reachable({x, y}) == f.reachable({x, y}));
        covered += b.reachable({x, y});
      }
    CHECK(covered == f.reachable_count());
  }
}

TEST_CASE("descent reaches the target without entering obstacles") {
  const Scenario s = load_scenario(testutil::scenario_path("single_obstacle"));
  const DistanceField f = to_destination(s);
  for (Cell c : s.area("o").cells) {
    if (c.x % 7 != 0) continue;
    const TracedPath p = trace_descent(f, cell_center(c, s.cell_size()), 0.1, 20000);
    CHECK(p.reached_target);
    CHECK_FALSE(p.entered_blocked);
    for (Vec2 q : p.points) CHECK(s.walkable(cell_of(q, s.cell_size())));
  }
}

TEST_CASE("detour angles alternate and stop at a right angle") {
  const auto a = detour_angles();
  REQUIRE(a.size() == 13);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == doctest::Approx(-a[2]));
  CHECK(a.back() == doctest::Approx(-std::numbers::pi / 2));
}
