// A single LiDAR sweep: points in the sensor frame plus per-point attributes.
#pragma once

#include <cstdint>
#include <vector>

#include "ssom/class_table.hpp"
#include "ssom/geometry.hpp"

namespace ssom {

struct Scan {
  std::vector<Vec3> points;         // sensor frame
  std::vector<float> intensities;   // one per point
  std::vector<ClassId> labels;      // empty when no labels are attached
  std::vector<float> confidences;   // per-point label probability, parallel to labels

  size_t size() const { return points.size(); }
  bool has_labels() const { return !labels.empty(); }
};

}  // namespace ssom
