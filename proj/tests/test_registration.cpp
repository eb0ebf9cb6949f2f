#include <cmath>

#include "doctest.h"
#include "ssom/geometry.hpp"
#include "ssom/projection.hpp"
#include "ssom/registration.hpp"

using namespace ssom;

namespace {

Vec3 pixel_dir(int u, int v, const RunConfig& cfg) {
  const double span = deg2rad(cfg.fov_up_deg - cfg.fov_down_deg);
  const double yaw = M_PI * (1.0 - 2.0 * (u + 0.5) / cfg.width);
  const double pitch = deg2rad(cfg.fov_down_deg) + span * (1.0 - (v + 0.5) / cfg.height);
  return Vec3(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
              std::sin(pitch));
}

// Range scan of a corner: planes x=10, y=10 and the floor z=-2, seen from the
// origin. Constrains all six degrees of freedom.
Scan corner_scan(const RunConfig& cfg, const Pose& sensor_from_world) {
  Scan scan;
  for (int v = 0; v < cfg.height; ++v)
    for (int u = 0; u < cfg.width; ++u) {
      const Vec3 d = pixel_dir(u, v, cfg);
      double r = 1e30;
      if (d.x() > 1e-6) r = std::min(r, 10.0 / d.x());
      if (d.y() > 1e-6) r = std::min(r, 10.0 / d.y());
      if (d.z() < -1e-6) r = std::min(r, -2.0 / d.z());
      if (r < 1.0 || r > 100.0) continue;
      scan.points.push_back(sensor_from_world * (r * d));
      scan.intensities.push_back(0.0f);
    }
  return scan;
}

FrameMaps single_pixel_maps(const RunConfig& cfg, const Vec3& p, const Vec3& n) {
  FrameMaps m(cfg.width, cfg.height);
  const PixelCoord px = project_to_pixel(p, cfg);
  const int i = m.idx(px.u, px.v);
  m.vertex[i] = p;
  m.vertex_valid[i] = 1;
  m.normal[i] = n;
  m.normal_valid[i] = 1;
  m.range[i] = p.norm();
  return m;
}

}  // namespace

TEST_CASE("association pairs a pixel with the model it lands on") {
  const RunConfig cfg;
  const FrameMaps obs = single_pixel_maps(cfg, Vec3(5, 0, 0), Vec3(-1, 0, 0));
  const FrameMaps model = single_pixel_maps(cfg, Vec3(5.05, 0, 0), Vec3(-1, 0, 0));

  const auto corrs = associate(obs, model, Pose::identity(), cfg);
  REQUIRE(corrs.size() == 1);
  const Correspondence& c = corrs[0];
  CHECK(c.u == 450);
  CHECK(c.v == 6);
  CHECK(c.obs_vertex == Vec3(5, 0, 0));
  CHECK(c.obs_in_model == Vec3(5, 0, 0));
  CHECK(c.model_vertex == Vec3(5.05, 0, 0));
  CHECK(c.residual == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(c.model_logodds > 1e8);  // projected rasters are fully trusted

  // The association pose moves the observation before the lookup.
  const Pose shift(Mat3::Identity(), Vec3(0.5, 0, 0));
  const auto moved = associate(obs, model, shift, cfg);
  REQUIRE(moved.size() == 1);
  CHECK(moved[0].obs_in_model == Vec3(5.5, 0, 0));
  CHECK(moved[0].residual == doctest::Approx(-0.45).epsilon(1e-12));
}

TEST_CASE("association gates on distance, angle, and empty model pixels") {
  const RunConfig cfg;
  const FrameMaps obs = single_pixel_maps(cfg, Vec3(5, 0, 0), Vec3(-1, 0, 0));

  // Too far away.
  FrameMaps far_model = single_pixel_maps(cfg, Vec3(5.6, 0, 0), Vec3(-1, 0, 0));
  CHECK(associate(obs, far_model, Pose::identity(), cfg).empty());

  // Normals disagree beyond the gate.
  const Vec3 tilted = Vec3(-1, 0, 1.01).normalized();  // ~45 deg
  FrameMaps tilted_model = single_pixel_maps(cfg, Vec3(5.05, 0, 0), tilted);
  CHECK(associate(obs, tilted_model, Pose::identity(), cfg).empty());

  // Nothing rendered at the target pixel.
  FrameMaps empty_model(cfg.width, cfg.height);
  CHECK(associate(obs, empty_model, Pose::identity(), cfg).empty());
}

TEST_CASE("self association has zero residuals everywhere") {
  const RunConfig cfg;
  const Scan scan = corner_scan(cfg, Pose::identity());
  const FrameMaps maps = project(scan, cfg);

  size_t eligible = 0;
  for (size_t i = 0; i < maps.vertex.size(); ++i)
    eligible += maps.vertex_valid[i] && maps.normal_valid[i];

  const auto corrs = associate(maps, maps, Pose::identity(), cfg);
  CHECK(corrs.size() == eligible);
  for (const Correspondence& c : corrs) {
    CHECK(c.residual == 0.0);
    CHECK(c.obs_vertex == c.model_vertex);
  }
}

TEST_CASE("correspondence weights") {
  RunConfig cfg;
  Correspondence c;
  c.residual = 0.05;  // inside the quadratic region
  c.obs_label = 50;
  c.obs_prob = 0.9f;
  c.model_label = 50;
  const double p = static_cast<double>(c.obs_prob);  // stored single precision

  CHECK(weight(c, cfg.l_stable, cfg) == doctest::Approx(p).epsilon(1e-12));

  // Large residuals are tempered by the Huber factor delta / |r|.
  c.residual = 0.2;
  CHECK(weight(c, cfg.l_stable, cfg) == doctest::Approx(p * 0.5).epsilon(1e-12));

  // Label disagreement flips the factor to the complement.
  c.residual = 0.05;
  c.model_label = 10;
  CHECK(weight(c, cfg.l_stable, cfg) == doctest::Approx(1.0 - p).epsilon(1e-12));

  // Unlabeled on either side is neutral.
  c.model_label = 0;
  CHECK(weight(c, cfg.l_stable, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  c.model_label = 10;
  c.obs_label = 0;
  CHECK(weight(c, cfg.l_stable, cfg) == doctest::Approx(1.0).epsilon(1e-12));

  // Switching semantics off neutralizes the factor entirely.
  c.obs_label = 50;
  cfg.semantic_weighting = false;
  CHECK(weight(c, cfg.l_stable, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  cfg.semantic_weighting = true;

  // Unstable model surfels contribute nothing.
  CHECK(weight(c, cfg.l_stable - 1e-9, cfg) == 0.0);
}

TEST_CASE("gauss newton step validates its inputs") {
  const RunConfig cfg;
  Correspondence c;
  c.model_normal = Vec3(1, 0, 0);
  c.obs_in_model = Vec3(5, 1, 0);
  c.residual = 0.1;

  std::vector<Correspondence> five(5, c);
  CHECK_THROWS_AS(gauss_newton_step(five, std::vector<double>(5, 1.0), cfg),
                  DegenerateAssociation);

  // Enough correspondences but all weights zero.
  std::vector<Correspondence> six(6, c);
  CHECK_THROWS_AS(gauss_newton_step(six, std::vector<double>(6, 0.0), cfg),
                  DegenerateAssociation);

  CHECK_THROWS_AS(gauss_newton_step(six, std::vector<double>(5, 1.0), cfg),
                  std::invalid_argument);

  // One plane constrains only 3 of 6 degrees of freedom.
  std::vector<Correspondence> planar;
  for (int i = 0; i < 20; ++i) {
    Correspondence p;
    p.model_normal = Vec3(1, 0, 0);
    p.obs_in_model = Vec3(10.0, 0.3 * i, 0.1 * i * i);
    p.model_vertex = p.obs_in_model;
    p.residual = 0.01;
    planar.push_back(p);
  }
  CHECK_THROWS_AS(gauss_newton_step(planar, std::vector<double>(planar.size(), 1.0), cfg),
                  RankDeficient);
}

TEST_CASE("one step solves a pure translation exactly") {
  const RunConfig cfg;
  // Three orthogonal planes, each offset by a known amount along its normal.
  const Vec3 t_true(0.02, -0.03, 0.01);
  std::vector<Correspondence> corrs;
  const Vec3 normals[3] = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 4; ++i) {
      Correspondence c;
      c.model_normal = normals[k];
      c.model_vertex = 5.0 * normals[k] + 0.5 * i * normals[(k + 1) % 3];
      c.obs_in_model = c.model_vertex - t_true;
      c.residual = c.model_normal.dot(c.obs_in_model - c.model_vertex);
      corrs.push_back(c);
    }
  const Vec6 delta = gauss_newton_step(corrs, std::vector<double>(corrs.size(), 1.0), cfg);
  CHECK((delta.head<3>() - t_true).norm() < 1e-12);
  CHECK(delta.tail<3>().norm() < 1e-12);
}

TEST_CASE("icp recovers a small rigid offset on the corner scene") {
  const RunConfig cfg;
  const Pose t_true(
      Eigen::AngleAxisd(deg2rad(0.5), Vec3(0.2, -0.3, 1.0).normalized()).toRotationMatrix(),
      Vec3(0.03, -0.02, 0.04));

  const FrameMaps model = project(corner_scan(cfg, Pose::identity()), cfg);
  const FrameMaps obs = project(corner_scan(cfg, t_true.inverse()), cfg);

  const IcpResult res = icp(obs, model, Pose::identity(), cfg);
  CHECK(res.converged);
  CHECK_FALSE(res.degenerate);
  const Pose err = t_true.inverse() * res.increment;
  CHECK(err.translation().norm() < 1e-6);
  CHECK(err.rotation_angle() < 1e-6);

  // Diagnostics line up: one entry per accepted iteration, and accepted steps
  // never raise the weighted cost.
  CHECK(res.costs.size() == res.costs_before.size());
  CHECK(res.costs.size() == res.corr_counts.size());
  CHECK(!res.costs.empty());
  CHECK(res.final_cost == res.costs.back());
  for (size_t i = 0; i < res.costs.size(); ++i) {
    CHECK(res.costs[i] <= res.costs_before[i] + 1e-12);
    CHECK(res.corr_counts[i] >= 6);
  }
}

TEST_CASE("icp with nothing to match keeps the initial guess") {
  const RunConfig cfg;
  const FrameMaps obs = single_pixel_maps(cfg, Vec3(5, 0, 0), Vec3(-1, 0, 0));
  const FrameMaps empty_model(cfg.width, cfg.height);
  const Pose init(exp_so3(Vec3(0, 0, 0.1)), Vec3(1, 2, 3));

  const IcpResult res = icp(obs, empty_model, init, cfg);
  CHECK(res.degenerate);
  CHECK_FALSE(res.converged);
  CHECK((res.increment.translation() - init.translation()).norm() == 0.0);
  CHECK((res.increment.rotation() - init.rotation()).norm() == 0.0);
}
