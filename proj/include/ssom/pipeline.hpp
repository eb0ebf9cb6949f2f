#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssom/class_table.hpp"
#include "ssom/config.hpp"
#include "ssom/frame_maps.hpp"
#include "ssom/geometry.hpp"
#include "ssom/kitti_io.hpp"
#include "ssom/registration.hpp"
#include "ssom/scan.hpp"
#include "ssom/surfel_map.hpp"

namespace ssom {

enum class Mode { kGeometric, kNoMovable, kSemantic };

Mode parse_mode(const std::string& name);  // throws std::invalid_argument on unknown name
const char* mode_name(Mode mode);

// Applies the mode's switches on top of a base configuration: geometric and
// no-movable runs disable label weighting and the label-conflict penalty;
// semantic runs additionally stop trusting young movable-class surfels during
// registration.
RunConfig apply_mode(RunConfig cfg, Mode mode);

struct FrameResult {
  int frame = 0;
  Pose pose;                 // sensor-to-world
  Pose increment;            // previous-to-current sensor frame
  bool icp_converged = true;
  bool icp_degenerate = false;
  bool used_motion_prior = false;  // increment fell back to the prediction
  int icp_iterations = 0;
  double icp_cost = 0.0;
  int correspondences = 0;
  UpdateStats map_stats;
  size_t map_size = 0;
  size_t stable_surfels = 0;
  double ms_project = 0.0;
  double ms_icp = 0.0;
  double ms_integrate = 0.0;
  double ms_total = 0.0;
  IcpResult icp;  // full per-iteration diagnostics
};

// Everything a frame-to-model run carries between frames.
struct PipelineState {
  RunConfig cfg;
  Mode mode = Mode::kGeometric;
  ClassTable table;
  MovableSet movable;
  SurfelMap map;
  std::vector<Pose> poses;
  Pose last_increment;
  int next_frame = 0;

  PipelineState(const RunConfig& base_cfg, Mode m);
};

// Runs one scan through the pipeline: mode-dependent label handling,
// projection (plus mask refinement in semantic mode), frame-to-model ICP
// seeded with the constant-velocity prediction (optionally overridden),
// pose chaining, and map integration at the chained pose. Frames must arrive
// in order; frame 0 seeds the map at the identity.
FrameResult process_frame(PipelineState& state, const Scan& scan,
                          const Pose* init_override = nullptr);

struct OdometryReport {
  Trajectory trajectory;
  std::vector<FrameResult> frames;
  std::string mode;
  uint64_t seed = 0;
};

// Processes <data_dir>/velodyne/*.bin in name order (with
// <data_dir>/labels/<stem>.label when the mode consumes labels; missing label
// files are an error outside geometric mode). When out_dir is non-empty,
// writes poses.txt, stats.csv and icp_diag.csv there, plus map.ply when
// write_map is set. A dataset with zero scans yields an empty report and no
// output files.
OdometryReport run_sequence(const std::string& data_dir, const RunConfig& cfg, Mode mode,
                            const std::string& out_dir = "", bool write_map = false);

}  // namespace ssom
