#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ssom/geometry.hpp"
#include "ssom/kitti_io.hpp"

namespace ssom {

// Standard segment-length sets: odometry-benchmark convention and the short
// road-scale set.
extern const std::vector<double> kOdometryLengths;  // 100..800 by 100
extern const std::vector<double> kRoadLengths;      // 5..400, irregular

struct LengthError {
  double length = 0.0;           // requested segment length, meters
  double trans_pct = 0.0;        // translational error, percent of path
  double rot_deg_per_m = 0.0;    // rotational error, degrees per meter
  int samples = 0;
};

struct RelErrorReport {
  std::vector<LengthError> per_length;   // one entry per length that produced samples
  std::vector<double> skipped_lengths;   // requested lengths with no valid segment
  double avg_trans_pct = 0.0;            // averaged over every (start, length) sample
  double avg_rot_deg_per_m = 0.0;
  int total_samples = 0;
  int stride = 1;
};

// Relative pose error over fixed-path-length segments, averaged over all
// segment starts (spaced by stride). For each start and length, the segment
// ends at the first frame whose ground-truth path length exceeds the start's
// by the requested amount; errors are normalized by the actual segment path
// length. Throws std::invalid_argument on trajectory length mismatch or
// fewer than two poses.
RelErrorReport relative_errors(const Trajectory& est, const Trajectory& gt,
                               const std::vector<double>& lengths, int stride = 1);

// Per-frame translational error of the pose increment over a sliding window,
// in meters. Entry i compares frames i and i+window. Empty when the
// trajectories are shorter than the window.
std::vector<double> error_timeline(const Trajectory& est, const Trajectory& gt, int window = 1);

// Conjugates every pose by the given calibration transform (velo -> target
// frame), mapping a trajectory between sensor frames.
Trajectory apply_calib(const Trajectory& traj, const Pose& calib);

void write_report_csv(const RelErrorReport& report, std::ostream& out);

// Plain-text table: one row per length plus the overall average; rotation
// shown in degrees per 100 m alongside translation in percent.
std::string format_report_table(const RelErrorReport& report);

}  // namespace ssom
