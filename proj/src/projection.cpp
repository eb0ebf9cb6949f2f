#include "ssom/projection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ssom/parallel.hpp"

namespace ssom {

PixelCoord project_to_pixel(const Vec3& p, const RunConfig& cfg) {
  PixelCoord px;
  const double r = p.norm();
  if (r <= 0.0) return px;  // origin has no direction; caller filters these out
  const double yaw = std::atan2(p.y(), p.x());
  const double pitch = std::asin(std::clamp(p.z() / r, -1.0, 1.0));
  const double fov_up = deg2rad(cfg.fov_up_deg);
  const double fov_down = deg2rad(cfg.fov_down_deg);

  int u = static_cast<int>(std::floor(0.5 * (1.0 - yaw / M_PI) * cfg.width));
  u = std::clamp(u, 0, cfg.width - 1);

  const double vf = (1.0 - (pitch - fov_down) / (fov_up - fov_down)) * cfg.height;
  int v = static_cast<int>(std::floor(vf));
  px.in_rows = v >= 0 && v < cfg.height;
  v = std::clamp(v, 0, cfg.height - 1);

  px.u = u;
  px.v = v;
  return px;
}

FrameMaps project(const Scan& scan, const RunConfig& cfg) {
  if (scan.size() == 0) throw std::invalid_argument("project: empty scan");
  FrameMaps maps(cfg.width, cfg.height);
  for (size_t i = 0; i < scan.size(); ++i) {
    const Vec3& p = scan.points[i];
    const double r = p.norm();
    if (r <= 0.0) continue;
    const PixelCoord px = project_to_pixel(p, cfg);
    const int idx = maps.idx(px.u, px.v);
    // Nearest point claims the pixel; on an exact range tie the earlier
    // (smaller) point index keeps it because we only replace on strictly less.
    if (maps.range[idx] >= 0.0 && r >= maps.range[idx]) continue;
    maps.vertex[idx] = p;
    maps.vertex_valid[idx] = 1;
    maps.range[idx] = r;
    maps.point_index[idx] = static_cast<int32_t>(i);
    if (scan.has_labels()) {
      maps.label[idx] = scan.labels[i];
      maps.label_prob[idx] = scan.labels[i] != 0 ? scan.confidences[i] : 0.0f;
    }
  }
  compute_normals(maps, cfg);
  return maps;
}

void compute_normals(FrameMaps& maps, const RunConfig& cfg) {
  const int w = maps.width, h = maps.height;
  std::fill(maps.normal_valid.begin(), maps.normal_valid.end(), uint8_t(0));
  parallel_for(0, h, cfg.threads, [&](int v) {
    for (int u = 0; u < w; ++u) {
      const int ic = maps.idx(u, v);
      if (!maps.vertex_valid[ic]) continue;
      if (v + 1 >= h) continue;  // no row below
      const int ir = maps.idx(maps.wrap_u(u + 1), v);
      const int id = maps.idx(u, v + 1);
      if (!maps.vertex_valid[ir] || !maps.vertex_valid[id]) continue;
      const double rc = maps.range[ic];
      if (std::abs(maps.range[ir] - rc) > 0.3 * rc) continue;
      if (std::abs(maps.range[id] - rc) > 0.3 * rc) continue;
      const Vec3 n = (maps.vertex[ir] - maps.vertex[ic]).cross(maps.vertex[id] - maps.vertex[ic]);
      const double len = n.norm();
      if (len < 1e-8) continue;
      Vec3 unit = n / len;
      if (unit.dot(maps.vertex[ic]) > 0.0) unit = -unit;
      maps.normal[ic] = unit;
      maps.normal_valid[ic] = 1;
    }
  });
}

FrameMaps render_model(const SurfelMap& map, const Pose& pose, const RunConfig& cfg,
                       const MovableSet& movable, RenderPolicy policy) {
  FrameMaps maps(cfg.width, cfg.height);
  const Pose world_to_sensor = pose.inverse();
  const int current = map.frame_counter();
  for (size_t i = 0; i < map.size(); ++i) {
    const Surfel& s = map[i];
    if (policy == RenderPolicy::kRegistration &&
        !surfel_trusted_for_registration(s, current, cfg, movable))
      continue;
    const Vec3 p = world_to_sensor * s.position;
    const double r = p.norm();
    if (r < cfg.min_range || r > cfg.max_range) continue;
    const PixelCoord px = project_to_pixel(p, cfg);
    if (!px.in_rows) continue;
    const int idx = maps.idx(px.u, px.v);
    if (maps.range[idx] >= 0.0 && r >= maps.range[idx]) continue;
    Vec3 n = world_to_sensor.rotation() * s.normal;
    if (n.dot(p) > 0.0) n = -n;
    maps.vertex[idx] = p;
    maps.vertex_valid[idx] = 1;
    maps.range[idx] = r;
    maps.normal[idx] = n;
    maps.normal_valid[idx] = 1;
    maps.label[idx] = s.label;
    maps.label_prob[idx] = s.label != 0 ? s.label_prob : 0.0f;
    maps.surfel_index[idx] = static_cast<int32_t>(i);
    // For registration every rendered surfel is trusted by construction, so the
    // raster carries at least l_stable there; the update pass keeps raw values.
    maps.stability[idx] =
        policy == RenderPolicy::kRegistration ? std::max(s.logodds, cfg.l_stable) : s.logodds;
  }
  return maps;
}

namespace {

void write_pgm16(const std::vector<uint16_t>& data, int w, int h, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "P5\n" << w << " " << h << "\n65535\n";
  for (uint16_t v : data) {
    const uint8_t bytes[2] = {static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v & 0xFF)};
    out.write(reinterpret_cast<const char*>(bytes), 2);
  }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

}  // namespace

void dump_label_pgm(const FrameMaps& maps, const std::string& path) {
  std::vector<uint16_t> img(maps.label.begin(), maps.label.end());
  write_pgm16(img, maps.width, maps.height, path);
}

void dump_range_pgm(const FrameMaps& maps, const std::string& path, double max_range) {
  std::vector<uint16_t> img(maps.range.size(), 0);
  for (size_t i = 0; i < maps.range.size(); ++i) {
    if (maps.range[i] < 0.0) continue;
    const double t = std::clamp(maps.range[i] / max_range, 0.0, 1.0);
    img[i] = static_cast<uint16_t>(std::lround(t * 65535.0));
  }
  write_pgm16(img, maps.width, maps.height, path);
}

}  // namespace ssom
