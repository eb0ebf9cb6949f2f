#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ssom/class_table.hpp"
#include "ssom/config.hpp"
#include "ssom/geometry.hpp"
#include "ssom/scan.hpp"

namespace ssom {

// Oriented box, yawed about +z. Angles are kept in degrees so scenario files
// round-trip bit-exactly.
struct SceneBox {
  ClassId label = 0;
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Ones();
  double yaw_deg = 0.0;
};

// Rigid box on a constant-velocity trajectory. The box geometry lives in the
// object frame; pose_at(frame) maps object -> world.
struct Mover {
  SceneBox box;
  Vec3 pos0 = Vec3::Zero();
  double yaw0_deg = 0.0;
  Vec3 vel = Vec3::Zero();  // meters per frame
  double yaw_rate_deg = 0.0;  // degrees per frame

  Pose pose_at(int frame) const;
};

// Deterministic scene: static boxes, scripted movers, constant-velocity
// sensor trajectory.
struct Scenario {
  std::string name = "scenario";
  int frames = 0;
  double sigma = 0.0;  // range noise stddev, meters
  uint64_t seed = 42;
  std::vector<SceneBox> statics;
  std::vector<Mover> movers;
  Vec3 sensor_pos0 = Vec3::Zero();
  double sensor_yaw0_deg = 0.0;
  Vec3 sensor_vel = Vec3::Zero();  // meters per frame
  double sensor_yaw_rate_deg = 0.0;  // degrees per frame

  Pose sensor_pose(int frame) const;

  // Key-value scenario dialect (same shape as the run config files).
  static Scenario parse(std::istream& in, const std::string& origin = "scenario");
  static Scenario load(const std::string& path);
  std::string to_string() const;
};

bool operator==(const SceneBox& a, const SceneBox& b);
bool operator==(const Mover& a, const Mover& b);
bool operator==(const Scenario& a, const Scenario& b);

// Casts one ray per raster pixel from the sensor pose, keeps the nearest hit,
// perturbs ranges with N(0, sigma), drops ranges outside
// [cfg.min_range, cfg.max_range], and labels each point with the hit object's
// class. Returns the scan in the sensor frame plus the ground-truth pose.
std::pair<Scan, Pose> simulate(const Scenario& scn, int frame, const RunConfig& cfg);

// Flips each label with probability error_rate to a different label drawn
// from the nonzero labels present in the scan. Deterministic per seed.
Scan corrupt_labels(const Scan& scan, double error_rate, uint64_t seed);

// True when p falls inside any mover's box (inflated on all sides) at any
// frame of the scenario horizon. Ground-truth membership test for map audits.
bool in_mover_volume(const Scenario& scn, const Vec3& p, double inflate);

// Writes <out_dir>/velodyne/NNNNNN.bin, <out_dir>/labels/NNNNNN.label and
// <out_dir>/poses.txt for the whole horizon. label_error_rate > 0 corrupts
// labels (seeded by label_error_seed) before writing.
void export_scenario(const Scenario& scn, const std::string& out_dir, const RunConfig& cfg,
                     double label_error_rate = 0.0, uint64_t label_error_seed = 1);

// Canonical scenarios. Factories and the shipped scenario files agree field
// for field; tests hold both sides to that.
Scenario make_static_room();
Scenario make_highway_jam();
Scenario make_urban_parked();

}  // namespace ssom
