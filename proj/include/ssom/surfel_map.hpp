// The surfel map: disk-shaped patches with position, normal, radius, a semantic
// label and a stability log-odds that observations push up or down over time.
#pragma once

#include <string>
#include <vector>

#include "ssom/class_table.hpp"
#include "ssom/config.hpp"
#include "ssom/correspondence.hpp"
#include "ssom/frame_maps.hpp"
#include "ssom/geometry.hpp"

namespace ssom {

struct Surfel {
  Vec3 position = Vec3::Zero();  // world frame
  Vec3 normal = Vec3::UnitZ();   // world frame, unit length
  double radius = 0.0;
  double logodds = 0.0;          // stability l_s
  ClassId label = 0;
  float label_prob = 1.0f;
  int created_frame = 0;
  int updated_frame = 0;
};

// One stability step: the previous log-odds plus the attenuated confirmation
// term, minus the prior, minus (when penalize is set) the label-conflict
// penalty. alpha is the angle between surfel and measurement normals (rad,
// >= 0), dist the distance of the measurement from the surfel plane (m, >= 0).
// The attenuated probability is clamped to [1e-6, 1 - 1e-6] before the
// log-odds is taken.
double stability_update(double l_prev, double alpha, double dist, bool penalize,
                        const RunConfig& cfg);

// Disk radius for a measurement at p (sensor frame) with unit normal n: the
// pixel footprint at that range, enlarged with incidence angle (cosine clamped
// to 0.1 so grazing hits keep a finite radius).
double surfel_radius(const Vec3& p, const Vec3& n, const RunConfig& cfg);

class SurfelMap {
 public:
  size_t size() const { return surfels_.size(); }
  bool empty() const { return surfels_.empty(); }
  const Surfel& operator[](size_t i) const { return surfels_[i]; }
  Surfel& operator[](size_t i) { return surfels_[i]; }
  const std::vector<Surfel>& surfels() const { return surfels_; }
  std::vector<Surfel>& surfels() { return surfels_; }

  void add(const Surfel& s) { surfels_.push_back(s); }

  // Last frame passed to integrate(); -1 before the first integration.
  int frame_counter() const { return frame_counter_; }
  void set_frame_counter(int f) { frame_counter_ = f; }

  size_t stable_count(const RunConfig& cfg) const;

 private:
  std::vector<Surfel> surfels_;
  int frame_counter_ = -1;
};

inline bool surfel_stable(const Surfel& s, const RunConfig& cfg) {
  return s.logodds >= cfg.l_stable;
}

inline bool surfel_young(const Surfel& s, int current_frame, const RunConfig& cfg) {
  return current_frame - s.created_frame <= cfg.grace_frames;
}

// Trust policy for the registration model view: confirmed-stable surfels plus
// recently created ones, except that in semantic runs unconfirmed
// movable-labeled surfels are held back until they prove stable.
bool surfel_trusted_for_registration(const Surfel& s, int current_frame, const RunConfig& cfg,
                                     const MovableSet& movable);

struct UpdateStats {
  size_t created = 0;
  size_t updated = 0;       // surfels that received a stability update
  size_t fused = 0;         // subset whose geometry was refined
  size_t penalized = 0;     // subset that received the label-conflict penalty
  size_t deleted = 0;
  size_t init_pruned = 0;   // creations skipped by the initial movable prune
};

// Map update for one frame. Every associated surfel gets a stability step
// (and, when geometrically compatible and not penalized, a weighted-average
// refinement of position/normal/radius plus a label overwrite if the
// observation is more confident). Valid observation pixels without an
// association spawn new surfels. Finally, surfels that have fallen below
// l_unstable and outlived the grace window are deleted.
UpdateStats integrate(SurfelMap& map, const FrameMaps& obs,
                      const std::vector<Correspondence>& assoc, const Pose& pose, int frame,
                      const RunConfig& cfg, const MovableSet& movable);

enum class ExportMode { kAll, kStableOnly };
enum class ExportColor { kClass, kNormal, kGray };

// Writes the map as an ASCII PLY file: position, normal, radius, class id,
// stability log-odds and an RGB color per vertex.
void export_ply(const SurfelMap& map, const std::string& path, ExportMode mode, ExportColor color,
                const ClassTable& table, const RunConfig& cfg);

}  // namespace ssom
