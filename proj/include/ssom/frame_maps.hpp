// Per-frame rasters: vertex map, normal map, range map, semantic mask, and the
// provenance indices filled in by projection (point index) or rendering (surfel index).
#pragma once

#include <cstdint>
#include <vector>

#include "ssom/class_table.hpp"
#include "ssom/geometry.hpp"

namespace ssom {

struct FrameMaps {
  int width = 0;
  int height = 0;

  std::vector<Vec3> vertex;
  std::vector<uint8_t> vertex_valid;
  std::vector<Vec3> normal;
  std::vector<uint8_t> normal_valid;
  std::vector<double> range;        // ||vertex||; -1 where no vertex
  std::vector<ClassId> label;       // 0 = no label
  std::vector<float> label_prob;    // 0 where no label
  std::vector<int32_t> point_index;   // source point per pixel after projection, -1 none
  std::vector<int32_t> surfel_index;  // source surfel per pixel after rendering, -1 none
  std::vector<double> stability;      // surfel trust log-odds per rendered pixel

  FrameMaps() = default;
  FrameMaps(int w, int h) { reset(w, h); }

  void reset(int w, int h);

  int idx(int u, int v) const { return v * width + u; }
  bool inside(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }
  // Cyclic column index: azimuth wraps around.
  int wrap_u(int u) const { return ((u % width) + width) % width; }

  bool has_vertex(int u, int v) const { return vertex_valid[idx(u, v)] != 0; }
  bool has_normal(int u, int v) const { return normal_valid[idx(u, v)] != 0; }

  size_t valid_vertex_count() const;
  size_t valid_normal_count() const;
};

}  // namespace ssom
