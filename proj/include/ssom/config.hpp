// Run configuration: every tunable of the pipeline in one struct, loadable from a
// key = value file and overridable one key at a time (CLI --set key=value).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ssom {

// Log-odds ratio log(p / (1 - p)). Throws std::domain_error outside (0, 1).
double odds(double p);

struct RunConfig {
  // Range-image raster.
  int width = 900;
  int height = 64;
  double fov_up_deg = 3.0;
  double fov_down_deg = -25.0;

  // Point filtering at load time.
  double min_range = 0.5;
  double max_range = 120.0;

  // Surfel stability filter.
  double p_stable = 0.6;
  double p_prior = 0.5;
  double p_penalty = 0.6;
  double sigma_alpha = 0.0873;  // rad
  double sigma_d = 0.1;         // m
  double l_stable = 5.0 * 0.4054651081081644;   // odds(0.6) * 5
  double l_unstable = -2.0 * 0.4054651081081644;
  int grace_frames = 5;        // deletion protection and "young enough to render" window
  double alpha_max_deg = 30.0; // fusion compatibility gates
  double d_max = 0.2;
  int init_prune_frames = 1;   // frames during which movable-labeled surfels are not created
  double fuse_old_weight = 0.9;

  // Semantic mask refinement.
  int flood_kernel = 5;
  double flood_theta = 0.05;

  // Registration.
  double huber_delta = 0.1;
  double d_assoc = 0.5;
  double alpha_assoc_deg = 30.0;
  int icp_max_iter = 50;
  double icp_conv_eps = 1e-5;
  int icp_max_halvings = 5;
  double gn_cond_cap = 1e8;

  // Labels.
  double default_confidence = 0.8;
  std::string class_table;                 // optional table file; built-in default otherwise
  std::vector<uint16_t> movable_classes;   // explicit override of the table's movable set

  // Misc.
  unsigned seed = 42;
  int threads = 0;  // 0 = all cores
  int eval_stride = 1;

  // Mode-derived switches (set by the pipeline from the run mode, not config keys).
  bool semantic_weighting = true;   // apply the label-agreement factor in ICP weights
  bool penalty_enabled = true;      // apply the label-conflict penalty in map updates
  bool trust_young_movable = true;  // let unconfirmed movable-labeled surfels into the ICP model

  // Sets one field by its config-file key. Throws std::invalid_argument on an
  // unknown key or unparsable value.
  void set(const std::string& key, const std::string& value);

  // Serializes all keys in the file format (round-trips through load_config).
  std::string to_string() const;
};

RunConfig load_config(const std::string& path);

// Applies "key = value" lines from a stream; '#' starts a comment.
void apply_config_stream(std::istream& in, RunConfig& cfg, const std::string& origin);

}  // namespace ssom
