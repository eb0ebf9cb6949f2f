#include "doctest.h"
#include "ssom/frame_maps.hpp"
#include "ssom/semantics.hpp"

using namespace ssom;

namespace {

RunConfig small_cfg() {
  RunConfig cfg;
  cfg.width = 16;
  cfg.height = 8;
  cfg.flood_kernel = 3;
  cfg.flood_theta = 0.05;
  cfg.threads = 1;
  return cfg;
}

FrameMaps uniform_maps(const RunConfig& cfg, ClassId label) {
  FrameMaps m(cfg.width, cfg.height);
  for (int v = 0; v < cfg.height; ++v)
    for (int u = 0; u < cfg.width; ++u) {
      const int i = m.idx(u, v);
      m.vertex[i] = Vec3(10.0, 0.1 * u, 0.1 * v);
      m.vertex_valid[i] = 1;
      m.label[i] = label;
      m.label_prob[i] = 0.8f;
    }
  return m;
}

}  // namespace

TEST_CASE("erosion clears label boundaries only") {
  const RunConfig cfg = small_cfg();
  FrameMaps m = uniform_maps(cfg, 1);
  m.label[m.idx(8, 4)] = 2;  // one intruder

  erode_mask(m, cfg);

  // The intruder and every pixel whose 3x3 window saw the conflict are gone.
  for (int v = 3; v <= 5; ++v)
    for (int u = 7; u <= 9; ++u) {
      CAPTURE(u);
      CAPTURE(v);
      CHECK(m.label[m.idx(u, v)] == 0);
      CHECK(m.label_prob[m.idx(u, v)] == 0.0f);
    }
  // Outside the conflict neighborhood nothing changes.
  CHECK(m.label[m.idx(5, 4)] == 1);
  CHECK(m.label[m.idx(11, 4)] == 1);
  CHECK(m.label[m.idx(8, 1)] == 1);
}

TEST_CASE("unlabeled neighbors do not erode") {
  const RunConfig cfg = small_cfg();
  FrameMaps m = uniform_maps(cfg, 1);
  for (int v = 0; v < cfg.height; ++v) m.label[m.idx(3, v)] = 0;  // a blank column

  erode_mask(m, cfg);
  CHECK(m.label[m.idx(2, 4)] == 1);
  CHECK(m.label[m.idx(4, 4)] == 1);
}

TEST_CASE("erosion wraps in azimuth but clips in elevation") {
  const RunConfig cfg = small_cfg();
  FrameMaps m = uniform_maps(cfg, 1);
  for (int v = 0; v < cfg.height; ++v) m.label[m.idx(0, v)] = 2;  // conflicting first column

  FrameMaps wrapped = m;
  erode_mask(wrapped, cfg);
  // The last column neighbors the first across the seam.
  CHECK(wrapped.label[wrapped.idx(cfg.width - 1, 4)] == 0);
  CHECK(wrapped.label[wrapped.idx(cfg.width - 3, 4)] == 1);

  // Top and bottom rows are not vertical neighbors of each other.
  FrameMaps clipped = uniform_maps(cfg, 1);
  for (int u = 0; u < cfg.width; ++u) clipped.label[clipped.idx(u, 0)] = 2;
  erode_mask(clipped, cfg);
  CHECK(clipped.label[clipped.idx(5, cfg.height - 1)] == 1);
  CHECK(clipped.label[clipped.idx(5, 2)] == 1);
  CHECK(clipped.label[clipped.idx(5, 1)] == 0);  // adjacent to the conflicting row
}

TEST_CASE("fill adopts a depth-consistent neighbor label") {
  const RunConfig cfg = small_cfg();
  FrameMaps m(cfg.width, cfg.height);
  const int u = 8, v = 4;
  const int ic = m.idx(u, v);
  m.vertex[ic] = Vec3(10.0, 0.0, 0.0);
  m.vertex_valid[ic] = 1;  // unlabeled pixel at range 10

  const int in = m.idx(u + 1, v);
  m.vertex[in] = Vec3(10.0, 0.1, 0.0);  // 0.1 m away < theta * 10 = 0.5
  m.vertex_valid[in] = 1;
  m.label[in] = 7;
  m.label_prob[in] = 0.6f;

  FrameMaps filled = m;
  fill_mask(filled, cfg);
  CHECK(filled.label[ic] == 7);
  CHECK(filled.label_prob[ic] == 0.6f);

  // A neighbor 2 m away fails the same test.
  FrameMaps far = m;
  far.vertex[in] = Vec3(12.0, 0.0, 0.0);
  fill_mask(far, cfg);
  CHECK(far.label[ic] == 0);
}

TEST_CASE("fill leaves labeled and invalid pixels alone") {
  const RunConfig cfg = small_cfg();
  FrameMaps m = uniform_maps(cfg, 3);
  const int ic = m.idx(5, 4);
  m.label[ic] = 9;  // pre-labeled pixel keeps its label
  FrameMaps out = m;
  fill_mask(out, cfg);
  CHECK(out.label[ic] == 9);

  // An unlabeled pixel without a vertex stays empty even among labeled neighbors.
  m.label[ic] = 0;
  m.vertex_valid[ic] = 0;
  out = m;
  fill_mask(out, cfg);
  CHECK(out.label[ic] == 0);
}

TEST_CASE("fill takes the first qualifying neighbor in window order") {
  const RunConfig cfg = small_cfg();
  FrameMaps m(cfg.width, cfg.height);
  const int u = 8, v = 4;
  const int ic = m.idx(u, v);
  m.vertex[ic] = Vec3(10.0, 0.0, 0.0);
  m.vertex_valid[ic] = 1;

  const auto plant = [&](int du, int dv, ClassId label) {
    const int i = m.idx(u + du, v + dv);
    m.vertex[i] = Vec3(10.0, 0.05 * du, 0.05 * dv);
    m.vertex_valid[i] = 1;
    m.label[i] = label;
    m.label_prob[i] = 0.5f;
  };
  plant(1, 0, 21);    // same row, right
  plant(-1, -1, 20);  // previous row: earlier in row-major window order

  fill_mask(m, cfg);
  CHECK(m.label[ic] == 20);
}

TEST_CASE("refine composes erosion and fill") {
  const RunConfig cfg = small_cfg();
  FrameMaps m = uniform_maps(cfg, 1);
  m.label[m.idx(8, 4)] = 2;
  m.label[m.idx(2, 2)] = 2;

  FrameMaps manual = m;
  erode_mask(manual, cfg);
  fill_mask(manual, cfg);

  FrameMaps combined = m;
  refine(combined, cfg);
  CHECK(combined.label == manual.label);
  CHECK(combined.label_prob == manual.label_prob);

  // Erosion carves a full window around each intruder. One fill pass repairs
  // every hole pixel that still sees a labeled neighbor — all but the hole
  // centers, whose whole window was cleared.
  size_t zeros = 0;
  for (ClassId l : combined.label) zeros += l == 0;
  CHECK(zeros == 2);
  CHECK(combined.label[combined.idx(8, 4)] == 0);
  CHECK(combined.label[combined.idx(2, 2)] == 0);
  // The contaminated ring is back to the majority label, not the intruder's.
  for (int dv = -1; dv <= 1; ++dv)
    for (int du = -1; du <= 1; ++du) {
      if (du == 0 && dv == 0) continue;
      CHECK(combined.label[combined.idx(8 + du, 4 + dv)] == 1);
    }
}

TEST_CASE("kernel validation") {
  RunConfig cfg = small_cfg();
  FrameMaps m = uniform_maps(cfg, 1);
  cfg.flood_kernel = 4;  // must be odd
  CHECK_THROWS_AS(erode_mask(m, cfg), std::invalid_argument);
  CHECK_THROWS_AS(fill_mask(m, cfg), std::invalid_argument);
  cfg.flood_kernel = -1;
  CHECK_THROWS_AS(erode_mask(m, cfg), std::invalid_argument);
}
