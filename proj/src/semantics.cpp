#include "ssom/semantics.hpp"

#include <stdexcept>

#include "ssom/parallel.hpp"

namespace ssom {

namespace {

void check_kernel(const RunConfig& cfg) {
  if (cfg.flood_kernel < 1 || cfg.flood_kernel % 2 == 0)
    throw std::invalid_argument("flood_kernel must be a positive odd number");
}

}  // namespace

void erode_mask(FrameMaps& maps, const RunConfig& cfg) {
  check_kernel(cfg);
  const int k = cfg.flood_kernel / 2;
  const int w = maps.width, h = maps.height;
  std::vector<ClassId> out(maps.label);
  std::vector<float> out_prob(maps.label_prob);
  parallel_for(0, h, cfg.threads, [&](int v) {
    for (int u = 0; u < w; ++u) {
      const ClassId mine = maps.label[maps.idx(u, v)];
      if (mine == 0) continue;
      bool keep = true;
      for (int dv = -k; dv <= k && keep; ++dv) {
        const int vv = v + dv;
        if (vv < 0 || vv >= h) continue;
        for (int du = -k; du <= k; ++du) {
          const ClassId other = maps.label[maps.idx(maps.wrap_u(u + du), vv)];
          if (other != 0 && other != mine) {
            keep = false;
            break;
          }
        }
      }
      if (!keep) {
        out[maps.idx(u, v)] = 0;
        out_prob[maps.idx(u, v)] = 0.0f;
      }
    }
  });
  maps.label = std::move(out);
  maps.label_prob = std::move(out_prob);
}

void fill_mask(FrameMaps& maps, const RunConfig& cfg) {
  check_kernel(cfg);
  const int k = cfg.flood_kernel / 2;
  const int w = maps.width, h = maps.height;
  std::vector<ClassId> out(maps.label);
  std::vector<float> out_prob(maps.label_prob);
  parallel_for(0, h, cfg.threads, [&](int v) {
    for (int u = 0; u < w; ++u) {
      const int ic = maps.idx(u, v);
      if (maps.label[ic] != 0 || !maps.vertex_valid[ic]) continue;
      const Vec3& p = maps.vertex[ic];
      const double bound = cfg.flood_theta * p.norm();
      for (int dv = -k; dv <= k; ++dv) {
        const int vv = v + dv;
        if (vv < 0 || vv >= h) continue;
        bool done = false;
        for (int du = -k; du <= k; ++du) {
          if (du == 0 && dv == 0) continue;
          const int in = maps.idx(maps.wrap_u(u + du), vv);
          if (maps.label[in] == 0 || !maps.vertex_valid[in]) continue;
          if ((p - maps.vertex[in]).norm() < bound) {
            out[ic] = maps.label[in];
            out_prob[ic] = maps.label_prob[in];
            done = true;
            break;
          }
        }
        if (done) break;
      }
    }
  });
  maps.label = std::move(out);
  maps.label_prob = std::move(out_prob);
}

void refine(FrameMaps& maps, const RunConfig& cfg) {
  erode_mask(maps, cfg);
  fill_mask(maps, cfg);
}

}  // namespace ssom
