#include "ssom/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ssom/projection.hpp"
#include "ssom/semantics.hpp"

namespace ssom {

namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "geometric") return Mode::kGeometric;
  if (name == "nomovable") return Mode::kNoMovable;
  if (name == "semantic") return Mode::kSemantic;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected geometric, nomovable or semantic)");
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kGeometric: return "geometric";
    case Mode::kNoMovable: return "nomovable";
    case Mode::kSemantic: return "semantic";
  }
  return "unknown";
}

RunConfig apply_mode(RunConfig cfg, Mode mode) {
  switch (mode) {
    case Mode::kGeometric:
    case Mode::kNoMovable:
      cfg.semantic_weighting = false;
      cfg.penalty_enabled = false;
      cfg.trust_young_movable = true;
      break;
    case Mode::kSemantic:
      cfg.semantic_weighting = true;
      cfg.penalty_enabled = true;
      cfg.trust_young_movable = false;
      break;
  }
  return cfg;
}

PipelineState::PipelineState(const RunConfig& base_cfg, Mode m)
    : cfg(apply_mode(base_cfg, m)),
      mode(m),
      table(base_cfg.class_table.empty() ? ClassTable::default_table()
                                         : ClassTable::load(base_cfg.class_table)),
      movable(base_cfg.movable_classes.empty() ? MovableSet::from_table(table)
                                               : MovableSet(base_cfg.movable_classes)),
      last_increment(Pose::identity()) {}

FrameResult process_frame(PipelineState& state, const Scan& scan, const Pose* init_override) {
  const auto t_start = std::chrono::steady_clock::now();
  const RunConfig& cfg = state.cfg;
  FrameResult result;
  result.frame = state.next_frame;

  // Mode-dependent label handling before anything touches the raster.
  Scan work = scan;
  if (state.mode == Mode::kGeometric) {
    work.labels.clear();
    work.confidences.clear();
  } else if (state.mode == Mode::kNoMovable && work.has_labels()) {
    Scan kept;
    kept.points.reserve(work.size());
    for (size_t i = 0; i < work.size(); ++i) {
      if (is_movable(work.labels[i], state.movable)) continue;
      kept.points.push_back(work.points[i]);
      if (i < work.intensities.size()) kept.intensities.push_back(work.intensities[i]);
      kept.labels.push_back(work.labels[i]);
      kept.confidences.push_back(i < work.confidences.size() ? work.confidences[i] : 0.0f);
    }
    work = std::move(kept);
  }

  const auto t_proj = std::chrono::steady_clock::now();
  FrameMaps obs = project(work, cfg);
  if (state.mode == Mode::kSemantic && work.has_labels()) refine(obs, cfg);
  result.ms_project = ms_since(t_proj);

  Pose pose;
  if (state.next_frame == 0) {
    pose = Pose::identity();
    state.last_increment = Pose::identity();
  } else {
    const Pose& prev = state.poses.back();
    const Pose init = init_override ? *init_override : state.last_increment;

    const auto t_icp = std::chrono::steady_clock::now();
    const FrameMaps model =
        render_model(state.map, prev, cfg, state.movable, RenderPolicy::kRegistration);
    result.icp = icp(obs, model, init, cfg);
    result.ms_icp = ms_since(t_icp);

    result.icp_converged = result.icp.converged;
    result.icp_degenerate = result.icp.degenerate;
    result.icp_iterations = result.icp.iterations;
    result.icp_cost = result.icp.final_cost;
    result.correspondences =
        result.icp.corr_counts.empty() ? 0 : result.icp.corr_counts.back();

    Pose increment = result.icp.increment;
    if (result.icp.degenerate) {
      increment = init_override ? *init_override : state.last_increment;
      result.used_motion_prior = true;
    }
    result.increment = increment;
    state.last_increment = increment;
    pose = prev * increment;
  }

  const auto t_map = std::chrono::steady_clock::now();
  std::vector<Correspondence> assoc;
  if (state.next_frame > 0 && !state.map.empty()) {
    const FrameMaps update_view =
        render_model(state.map, pose, cfg, state.movable, RenderPolicy::kMapUpdate);
    assoc = associate(obs, update_view, Pose::identity(), cfg);
  }
  result.map_stats = integrate(state.map, obs, assoc, pose, state.next_frame, cfg, state.movable);
  result.ms_integrate = ms_since(t_map);

  result.pose = pose;
  result.map_size = state.map.size();
  result.stable_surfels = state.map.stable_count(cfg);
  state.poses.push_back(pose);
  ++state.next_frame;
  result.ms_total = ms_since(t_start);
  return result;
}

namespace {

std::vector<std::filesystem::path> list_scans(const std::string& data_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(data_dir) / "velodyne";
  std::vector<fs::path> scans;
  if (!fs::exists(dir)) throw std::runtime_error("no velodyne directory under " + data_dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".bin")
      scans.push_back(entry.path());
  std::sort(scans.begin(), scans.end());
  return scans;
}

void write_stats_csv(const OdometryReport& report, const std::string& path) {
  std::ofstream out(path);
  out << "frame,ms_total,ms_project,ms_icp,ms_integrate,iterations,converged,degenerate,"
         "motion_prior,correspondences,final_cost,created,updated,fused,penalized,deleted,"
         "init_pruned,map_size,stable_surfels\n";
  char buf[360];
  for (const FrameResult& f : report.frames) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.3f,%.3f,%.3f,%.3f,%d,%d,%d,%d,%d,%.9g,%zu,%zu,%zu,%zu,%zu,%zu,%zu,%zu\n",
                  f.frame, f.ms_total, f.ms_project, f.ms_icp, f.ms_integrate, f.icp_iterations,
                  f.icp_converged ? 1 : 0, f.icp_degenerate ? 1 : 0, f.used_motion_prior ? 1 : 0,
                  f.correspondences, f.icp_cost, f.map_stats.created, f.map_stats.updated,
                  f.map_stats.fused, f.map_stats.penalized, f.map_stats.deleted,
                  f.map_stats.init_pruned, f.map_size, f.stable_surfels);
    out << buf;
  }
}

void write_icp_diag_csv(const OdometryReport& report, const std::string& path) {
  std::ofstream out(path);
  out << "frame,iteration,correspondences,cost_before,cost_after\n";
  char buf[128];
  for (const FrameResult& f : report.frames) {
    for (size_t i = 0; i < f.icp.costs.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%d,%.9g,%.9g\n", f.frame, i,
                    f.icp.corr_counts[i], f.icp.costs_before[i], f.icp.costs[i]);
      out << buf;
    }
  }
}

}  // namespace

OdometryReport run_sequence(const std::string& data_dir, const RunConfig& cfg, Mode mode,
                            const std::string& out_dir, bool write_map) {
  namespace fs = std::filesystem;
  OdometryReport report;
  report.mode = mode_name(mode);
  report.seed = cfg.seed;

  const auto scans = list_scans(data_dir);
  if (scans.empty()) return report;

  PipelineState state(cfg, mode);
  for (const fs::path& scan_path : scans) {
    Scan scan = read_scan(scan_path.string(), cfg);
    if (mode != Mode::kGeometric) {
      const fs::path label_path =
          fs::path(data_dir) / "labels" / (scan_path.stem().string() + ".label");
      if (!fs::exists(label_path))
        throw std::runtime_error(mode_name(mode) + std::string(" mode needs labels: ") +
                                 label_path.string() + " not found");
      read_labels(label_path.string(), scan, cfg);
    }
    report.frames.push_back(process_frame(state, scan));
    report.trajectory.poses.push_back(report.frames.back().pose);
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_poses(report.trajectory, (fs::path(out_dir) / "poses.txt").string());
    write_stats_csv(report, (fs::path(out_dir) / "stats.csv").string());
    write_icp_diag_csv(report, (fs::path(out_dir) / "icp_diag.csv").string());
    if (write_map)
      export_ply(state.map, (fs::path(out_dir) / "map.ply").string(), ExportMode::kAll,
                 ExportColor::kClass, state.table, state.cfg);
  }
  return report;
}

}  // namespace ssom
