#pragma once

#include <vector>

#include "pedroute/field.hpp"

namespace pedroute {

/// A 4-connected component of cells that share one band index.
struct Region {
  int id = 0;
  int band_index = 0;
  std::vector<Cell> cells;  // row-major order
  /// Distance value of the equi-distance edge facing the target.
  double front_distance = 0.0;
};

enum class RegionClass { Simple, SplitSibling, Critical };

const char* to_string(RegionClass c);

/// Regions of a band map plus, for each region, the ids of the regions one
/// band closer to the target that share a cell edge with it.
struct RegionGraph {
  int width = 0;
  int height = 0;
  double band_width = 0.0;
  std::vector<Region> regions;
  std::vector<std::vector<int>> closer;  // sorted ascending
  std::vector<int> labels;               // region id per cell, -1 if unreachable

  int label(Cell c) const {
    if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) return -1;
    return labels[static_cast<std::size_t>(c.y) * width + c.x];
  }
};

/// Ids are ordered by band index, then by the region's first cell in
/// row-major order.
RegionGraph extract_regions(const BandMap& bm);

/// Critical: two or more closer neighbors. SplitSibling: shares its band with
/// another region. Simple: everything else.
std::vector<RegionClass> classify(const RegionGraph& g);

}  // namespace pedroute
