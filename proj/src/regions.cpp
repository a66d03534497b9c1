#include "pedroute/regions.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace pedroute {

const char* to_string(RegionClass c) {
  switch (c) {
    case RegionClass::Simple:
      return "simple";
    case RegionClass::SplitSibling:
      return "split";
    case RegionClass::Critical:
      return "critical";
  }
  return "?";
}

RegionGraph extract_regions(const BandMap& bm) {
  const int w = bm.width();
  const int h = bm.height();
  RegionGraph g;
  g.width = w;
  g.height = h;
  g.band_width = bm.band_width();
  g.labels.assign(static_cast<std::size_t>(w) * h, -1);

  // Row-major scan: components are discovered in order of their first cell.
  struct Raw {
    int band;
    std::size_t first;
    std::vector<Cell> cells;
  };
  std::vector<Raw> raw;
  std::vector<int> provisional(static_cast<std::size_t>(w) * h, -1);
  constexpr Cell kSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const auto b = bm.at({x, y});
      if (!b || provisional[i] != -1) continue;
      const int id = static_cast<int>(raw.size());
      Raw r{*b, i, {}};
      std::queue<Cell> q;
      q.push({x, y});
      provisional[i] = id;
      while (!q.empty()) {
        const Cell c = q.front();
        q.pop();
        r.cells.push_back(c);
        for (Cell d : kSteps) {
          const Cell n{c.x + d.x, c.y + d.y};
          const auto nb = bm.at(n);
          if (!nb || *nb != *b) continue;
          const std::size_t j = static_cast<std::size_t>(n.y) * w + n.x;
          if (provisional[j] != -1) continue;
          provisional[j] = id;
          q.push(n);
        }
      }
      std::sort(r.cells.begin(), r.cells.end(), [](Cell a, Cell b2) { return a.y != b2.y ? a.y < b2.y : a.x < b2.x; });
      raw.push_back(std::move(r));
    }
  }

  std::vector<int> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return raw[a].band != raw[b].band ? raw[a].band < raw[b].band : raw[a].first < raw[b].first;
  });
  std::vector<int> final_id(raw.size());
  for (std::size_t k = 0; k < order.size(); ++k) final_id[order[k]] = static_cast<int>(k);

  g.regions.resize(raw.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    Raw& r = raw[order[k]];
    Region& reg = g.regions[k];
    reg.id = static_cast<int>(k);
    reg.band_index = r.band;
    reg.front_distance = r.band * bm.band_width();
    reg.cells = std::move(r.cells);
  }
  for (std::size_t i = 0; i < provisional.size(); ++i)
    if (provisional[i] != -1) g.labels[i] = final_id[provisional[i]];

  std::vector<std::set<int>> closer(g.regions.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = g.label({x, y});
      if (a < 0) continue;
      for (Cell d : {Cell{1, 0}, Cell{0, 1}}) {
        const int b = g.label({x + d.x, y + d.y});
        if (b < 0 || a == b) continue;
        const int ba = g.regions[a].band_index, bb = g.regions[b].band_index;
        if (ba == bb + 1) closer[a].insert(b);
        if (bb == ba + 1) closer[b].insert(a);
      }
    }
  }
  g.closer.reserve(closer.size());
  for (auto& s : closer) g.closer.emplace_back(s.begin(), s.end());
  return g;
}

std::vector<RegionClass> classify(const RegionGraph& g) {
  std::map<int, int> per_band;
  for (const auto& r : g.regions) ++per_band[r.band_index];
  std::vector<RegionClass> out(g.regions.size(), RegionClass::Simple);
  for (const auto& r : g.regions) {
    if (g.closer[r.id].size() >= 2) {
      out[r.id] = RegionClass::Critical;
    } else if (per_band[r.band_index] >= 2) {
      out[r.id] = RegionClass::SplitSibling;
    }
  }
  return out;
}

}  // namespace pedroute
