#include "ssom/surfel_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace ssom {

double stability_update(double l_prev, double alpha, double dist, bool penalize,
                        const RunConfig& cfg) {
  if (alpha < 0.0 || dist < 0.0)
    throw std::invalid_argument("stability_update: alpha and dist must be non-negative");
  const double a = alpha / cfg.sigma_alpha;
  const double d = dist / cfg.sigma_d;
  double p = cfg.p_stable * std::exp(-a * a) * std::exp(-d * d);
  p = std::clamp(p, 1e-6, 1.0 - 1e-6);
  double l = l_prev + odds(p) - odds(cfg.p_prior);
  if (penalize) l -= odds(cfg.p_penalty);
  return l;
}

double surfel_radius(const Vec3& p, const Vec3& n, const RunConfig& cfg) {
  const double r = p.norm();
  const double azimuth_res = 2.0 * M_PI / cfg.width;
  const double cos_inc = r > 0.0 ? std::abs(n.dot(p)) / r : 1.0;
  return r * std::tan(azimuth_res) / std::max(cos_inc, 0.1);
}

size_t SurfelMap::stable_count(const RunConfig& cfg) const {
  size_t n = 0;
  for (const auto& s : surfels_) n += surfel_stable(s, cfg);
  return n;
}

bool surfel_trusted_for_registration(const Surfel& s, int current_frame, const RunConfig& cfg,
                                     const MovableSet& movable) {
  if (surfel_stable(s, cfg)) return true;
  if (!surfel_young(s, current_frame, cfg)) return false;
  return cfg.trust_young_movable || !movable.contains(s.label);
}

UpdateStats integrate(SurfelMap& map, const FrameMaps& obs,
                      const std::vector<Correspondence>& assoc, const Pose& pose, int frame,
                      const RunConfig& cfg, const MovableSet& movable) {
  UpdateStats stats;
  const Mat3& r_ws = pose.rotation();
  const double alpha_max = deg2rad(cfg.alpha_max_deg);
  std::vector<uint8_t> pixel_used(static_cast<size_t>(obs.width) * obs.height, 0);

  for (const Correspondence& c : assoc) {
    if (c.surfel < 0 || c.surfel >= static_cast<int32_t>(map.size()))
      throw std::invalid_argument("integrate: association references no surfel");
    pixel_used[obs.idx(c.u, c.v)] = 1;
    Surfel& s = map[static_cast<size_t>(c.surfel)];

    const Vec3 p_world = pose * c.obs_vertex;
    const Vec3 n_world = r_ws * c.obs_normal;
    const double alpha = angle_between(s.normal, n_world);
    const double dist = std::abs(s.normal.dot(p_world - s.position));

    const bool labels_conflict = c.obs_label != 0 && s.label != 0 && c.obs_label != s.label &&
                                 (movable.contains(c.obs_label) || movable.contains(s.label));
    const bool penalize = cfg.penalty_enabled && labels_conflict;

    s.logodds = stability_update(s.logodds, alpha, dist, penalize, cfg);
    ++stats.updated;
    if (penalize) ++stats.penalized;

    if (!penalize && alpha < alpha_max && dist < cfg.d_max) {
      const double w0 = cfg.fuse_old_weight, w1 = 1.0 - cfg.fuse_old_weight;
      s.position = w0 * s.position + w1 * p_world;
      Vec3 n = w0 * s.normal + w1 * n_world;
      if (n.norm() > 1e-12) s.normal = n.normalized();
      s.radius = w0 * s.radius + w1 * surfel_radius(c.obs_vertex, c.obs_normal, cfg);
      if (c.obs_label != 0 && c.obs_prob > s.label_prob) {
        s.label = c.obs_label;
        s.label_prob = c.obs_prob;
      }
      ++stats.fused;
    }
    s.updated_frame = frame;
  }

  // Unmatched valid pixels seed new surfels.
  const double l_init = odds(cfg.p_prior) + odds(std::clamp(cfg.p_stable, 1e-6, 1.0 - 1e-6));
  for (int v = 0; v < obs.height; ++v) {
    for (int u = 0; u < obs.width; ++u) {
      const int i = obs.idx(u, v);
      if (pixel_used[i] || !obs.vertex_valid[i] || !obs.normal_valid[i]) continue;
      if (frame < cfg.init_prune_frames && movable.contains(obs.label[i])) {
        ++stats.init_pruned;
        continue;
      }
      Surfel s;
      s.position = pose * obs.vertex[i];
      s.normal = r_ws * obs.normal[i];
      s.radius = surfel_radius(obs.vertex[i], obs.normal[i], cfg);
      s.logodds = l_init;
      s.label = obs.label[i];
      s.label_prob = obs.label[i] != 0 ? obs.label_prob[i] : 1.0f;
      s.created_frame = frame;
      s.updated_frame = frame;
      map.add(s);
      ++stats.created;
    }
  }

  // Deletion: decayed below l_unstable and past the grace window.
  auto& surfels = map.surfels();
  const size_t before = surfels.size();
  surfels.erase(std::remove_if(surfels.begin(), surfels.end(),
                               [&](const Surfel& s) {
                                 return s.logodds < cfg.l_unstable &&
                                        frame - s.created_frame > cfg.grace_frames;
                               }),
                surfels.end());
  stats.deleted = before - surfels.size();
  map.set_frame_counter(frame);
  return stats;
}

void export_ply(const SurfelMap& map, const std::string& path, ExportMode mode, ExportColor color,
                const ClassTable& table, const RunConfig& cfg) {
  std::vector<const Surfel*> keep;
  keep.reserve(map.size());
  for (const auto& s : map.surfels())
    if (mode == ExportMode::kAll || surfel_stable(s, cfg)) keep.push_back(&s);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "ply\nformat ascii 1.0\nelement vertex " << keep.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n"
      << "property float radius\nproperty ushort class\nproperty float stability\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  char buf[256];
  for (const Surfel* s : keep) {
    int r = 128, g = 128, b = 128;
    switch (color) {
      case ExportColor::kClass:
        if (table.has(s->label)) {
          const auto& rgb = table.info(s->label).rgb;
          r = rgb[0];
          g = rgb[1];
          b = rgb[2];
        }
        break;
      case ExportColor::kNormal:
        r = static_cast<int>(std::lround((s->normal.x() * 0.5 + 0.5) * 255.0));
        g = static_cast<int>(std::lround((s->normal.y() * 0.5 + 0.5) * 255.0));
        b = static_cast<int>(std::lround((s->normal.z() * 0.5 + 0.5) * 255.0));
        break;
      case ExportColor::kGray: {
        const double p = 1.0 / (1.0 + std::exp(-s->logodds));
        r = g = b = static_cast<int>(std::lround(p * 255.0));
        break;
      }
    }
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f %.6f %.6f %.6f %u %.6f %d %d %d\n",
                  s->position.x(), s->position.y(), s->position.z(), s->normal.x(), s->normal.y(),
                  s->normal.z(), s->radius, unsigned(s->label), s->logodds, r, g, b);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

}  // namespace ssom
