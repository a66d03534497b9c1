#include "pedroute/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pedroute {

namespace {

std::ofstream open_binary(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

template <class F>
GrayImage gray(const DistanceField& f, F&& level) {
  GrayImage img{f.width(), f.height(), std::vector<std::uint8_t>(static_cast<std::size_t>(f.width()) * f.height(), 0)};
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      if (const auto v = f.get({x, y}))
        img.pixels[static_cast<std::size_t>(y) * f.width() + x] =
            static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(level(*v), 0.0, 1.0)));
  return img;
}

// Distinct hues for route polylines.
constexpr const char* kRouteColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                        "#17becf", "#8c564b", "#e377c2", "#bcbd22", "#7f7f7f"};

}  // namespace

GrayImage render_field(const DistanceField& f) {
  const double m = f.max_value();
  return gray(f, [m](double v) { return m > 0.0 ? v / m : 0.0; });
}

GrayImage render_modulo(const DistanceField& f, double d) {
  if (!(d > 0.0)) throw FieldError("modulo width must be positive");
  return gray(f, [d](double v) { return std::fmod(v, d) / d; });
}

RgbImage render_regions(const Scenario& s, const RegionGraph& g, const std::vector<RegionClass>& classes) {
  RgbImage img{s.width(), s.height(), {}};
  img.pixels.resize(static_cast<std::size_t>(s.width()) * s.height());
  for (int y = 0; y < s.height(); ++y)
    for (int x = 0; x < s.width(); ++x) {
      auto& px = img.pixels[static_cast<std::size_t>(y) * s.width() + x];
      const int id = g.label({x, y});
      if (!s.walkable({x, y}))
        px = palette::kObstacle;
      else if (id < 0)
        px = palette::kUnreachable;
      else if (classes[id] == RegionClass::Critical)
        px = palette::kCritical;
      else if (classes[id] == RegionClass::SplitSibling)
        px = palette::kSplit;
      else
        px = palette::kSimple;
      if (id >= 0 && g.regions[id].band_index % 2 == 1)
        for (auto& ch : px) ch = static_cast<std::uint8_t>(ch * 3 / 4);
    }
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  auto out = open_binary(path);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

void write_ppm(const RgbImage& img, const std::string& path) {
  auto out = open_binary(path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  for (const auto& px : img.pixels) out.write(reinterpret_cast<const char*>(px.data()), 3);
}

std::string routes_svg(const Scenario& s, const RouteSet& rs, Vec2 start) {
  const double cs = s.cell_size();
  std::ostringstream o;
  o.precision(4);
  o << std::fixed;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << s.width() * cs << ' ' << s.height() * cs
    << "\" width=\"" << s.width() * 4 << "\" height=\"" << s.height() * 4 << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  auto runs = [&](auto&& member, const char* fill, const char* extra) {
    for (int y = 0; y < s.height(); ++y) {
      int x = 0;
      while (x < s.width()) {
        if (!member(Cell{x, y})) {
          ++x;
          continue;
        }
        const int x0 = x;
        while (x < s.width() && member(Cell{x, y})) ++x;
        o << "<rect x=\"" << x0 * cs << "\" y=\"" << y * cs << "\" width=\"" << (x - x0) * cs << "\" height=\"" << cs
          << "\" fill=\"" << fill << "\"" << extra << "/>\n";
      }
    }
  };

  runs([&](Cell c) { return !s.walkable(c); }, "#222222", "");
  for (const auto& a : s.areas()) {
    const CellMask m = CellMask::from_cells(s.width(), s.height(), a.cells);
    runs([&](Cell c) { return m.test(c); }, a.role == AreaRole::Origin ? "#e04040" : "#30a030", "");
  }
  for (const auto& a : rs.areas) {
    const CellMask m = CellMask::from_cells(s.width(), s.height(), a.cells);
    o << "<g id=\"" << a.id << "\">\n";
    runs([&](Cell c) { return m.test(c); }, "#3060ff", " fill-opacity=\"0.25\"");
    o << "</g>\n";
  }

  for (std::size_t i = 0; i < rs.routes.size(); ++i) {
    const Route& r = rs.routes[i];
    const auto path = trace_route(rs, r, start, 0.5 * cs);
    o << "<polyline data-route=\"" << r.id << "\" fill=\"none\" stroke=\"" << kRouteColors[i % std::size(kRouteColors)]
      << "\" stroke-width=\"" << 2 * cs << "\" points=\"";
    for (std::size_t k = 0; k < path.size(); k += 4) o << path[k].x << ',' << path[k].y << ' ';
    o << path.back().x << ',' << path.back().y << "\"/>\n";
    if (!r.legs.empty()) {
      const IntermediateArea& first = rs.area(r.legs.front());
      const Vec2 at = area_anchor(Area{first.id, '?', AreaRole::Origin, first.cells}, cs);
      o << "<text x=\"" << at.x << "\" y=\"" << at.y << "\" font-size=\"" << 8 * cs << "\" fill=\"#b08000\">" << r.id
        << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace pedroute
