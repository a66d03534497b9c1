#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pedroute/routes.hpp"

namespace pedroute {

/// 8-bit grayscale raster, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::array<std::uint8_t, 3>> pixels;
};

/// Brightness proportional to distance; unreachable cells are black.
GrayImage render_field(const DistanceField& f);
/// Brightness proportional to distance modulo d, so every d meters the
/// brightness drops back to zero.
GrayImage render_modulo(const DistanceField& f, double d);

namespace palette {
inline constexpr std::array<std::uint8_t, 3> kObstacle{0, 0, 0};
inline constexpr std::array<std::uint8_t, 3> kUnreachable{96, 96, 96};
inline constexpr std::array<std::uint8_t, 3> kSimple{0, 200, 220};
inline constexpr std::array<std::uint8_t, 3> kSplit{255, 150, 0};
inline constexpr std::array<std::uint8_t, 3> kCritical{230, 0, 230};
}  // namespace palette

/// One color per region class; odd bands are drawn a shade darker.
RgbImage render_regions(const Scenario& s, const RegionGraph& g, const std::vector<RegionClass>& classes);

void write_pgm(const GrayImage& img, const std::string& path);
void write_ppm(const RgbImage& img, const std::string& path);

/// Obstacles, origin and destination areas, intermediate areas, and the
/// path of every route from `start`.
std::string routes_svg(const Scenario& s, const RouteSet& rs, Vec2 start);

}  // namespace pedroute
