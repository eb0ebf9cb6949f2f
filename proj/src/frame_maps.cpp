#include "ssom/frame_maps.hpp"

#include <stdexcept>

namespace ssom {

void FrameMaps::reset(int w, int h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("raster dimensions must be positive");
  width = w;
  height = h;
  const size_t n = static_cast<size_t>(w) * h;
  vertex.assign(n, Vec3::Zero());
  vertex_valid.assign(n, 0);
  normal.assign(n, Vec3::Zero());
  normal_valid.assign(n, 0);
  range.assign(n, -1.0);
  label.assign(n, 0);
  label_prob.assign(n, 0.0f);
  point_index.assign(n, -1);
  surfel_index.assign(n, -1);
  stability.assign(n, 1e9);  // "trusted" unless a render pass says otherwise
}

size_t FrameMaps::valid_vertex_count() const {
  size_t n = 0;
  for (uint8_t v : vertex_valid) n += v != 0;
  return n;
}

size_t FrameMaps::valid_normal_count() const {
  size_t n = 0;
  for (uint8_t v : normal_valid) n += v != 0;
  return n;
}

}  // namespace ssom
