// One observation-pixel-to-model association, shared between registration and map update.
#pragma once

#include <cstdint>

#include "ssom/class_table.hpp"
#include "ssom/geometry.hpp"

namespace ssom {

struct Correspondence {
  int u = 0, v = 0;        // observation pixel
  Vec3 obs_vertex = Vec3::Zero();   // current sensor frame
  Vec3 obs_normal = Vec3::Zero();
  Vec3 obs_in_model = Vec3::Zero();  // obs_vertex transformed by the association pose
  Vec3 model_vertex = Vec3::Zero();  // frame the model raster was rendered in
  Vec3 model_normal = Vec3::Zero();
  ClassId obs_label = 0;
  float obs_prob = 0.0f;
  ClassId model_label = 0;
  float model_prob = 0.0f;
  int32_t surfel = -1;            // model surfel id; -1 when the model is a plain raster
  double model_logodds = 1e9;     // trust log-odds of the model pixel
  double residual = 0.0;          // point-to-plane residual at the association pose
};

}  // namespace ssom
