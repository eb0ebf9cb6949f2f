// Readers and writers for the KITTI odometry file formats: .bin point clouds,
// .label per-point semantics, and 3x4 row-major pose text files.
#pragma once

#include <string>
#include <vector>

#include "ssom/config.hpp"
#include "ssom/geometry.hpp"
#include "ssom/scan.hpp"

namespace ssom {

struct Trajectory {
  std::vector<Pose> poses;

  size_t size() const { return poses.size(); }
  bool empty() const { return poses.empty(); }
  const Pose& operator[](size_t i) const { return poses[i]; }
};

// Reads a .bin scan: little-endian float32 quadruples (x, y, z, intensity).
// Non-finite points and points outside [cfg.min_range, cfg.max_range] are
// dropped; the drop count is reported through *dropped (and logged to stderr
// when nonzero). Throws std::runtime_error on missing files or a byte count
// that is not a multiple of 16.
Scan read_scan(const std::string& path, const RunConfig& cfg, size_t* dropped = nullptr);

// Writes points + intensities in the same binary layout.
void write_scan(const Scan& scan, const std::string& path);

// Reads a .label file: one little-endian uint32 per point, semantic class in the
// low 16 bits. Fills scan.labels/scan.confidences. Confidences default to
// cfg.default_confidence unless a sibling file with extension .prob exists
// (little-endian float32 per point). Throws if the label count does not match.
void read_labels(const std::string& path, Scan& scan, const RunConfig& cfg);

void write_labels(const Scan& scan, const std::string& path);

// Pose text files: one pose per line, 12 whitespace-separated values, the top
// 3x4 of the homogeneous matrix in row-major order. Rotations are
// re-orthonormalized on read when the drift exceeds 1e-6 (with a warning).
// Throws std::runtime_error naming the offending line on malformed input.
Trajectory read_poses(const std::string& path);

void write_poses(const Trajectory& traj, const std::string& path);

// Reads the "Tr:" (or single unlabeled) 3x4 transform from a KITTI calib.txt.
Pose read_calib(const std::string& path);

}  // namespace ssom
