#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssom/evaluation.hpp"
#include "ssom/pipeline.hpp"
#include "ssom/projection.hpp"
#include "ssom/semantics.hpp"
#include "ssom/surfel_map.hpp"
#include "ssom/synthworld.hpp"

namespace {

using namespace ssom;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  unsigned seed = 0;
  int threads = -1;
  bool seed_given = false;
  bool threads_given = false;
  bool print_config = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (key = value lines)");
  cmd->add_option("--set", opts.sets, "override one config key, e.g. --set huber_delta=0.2")
      ->type_name("KEY=VALUE");
  cmd->add_option("--seed", opts.seed, "RNG seed for synthetic data")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)")
      ->each([&opts](const std::string&) { opts.threads_given = true; });
  cmd->add_flag("--print-config", opts.print_config, "echo the fully-resolved configuration");
}

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  for (const std::string& kv : opts.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed_given) cfg.seed = opts.seed;
  if (opts.threads_given) cfg.threads = opts.threads;
  if (opts.print_config) std::fputs(cfg.to_string().c_str(), stdout);
  return cfg;
}

Scenario load_scenario(const std::string& ref) {
  if (ref == "static_room") return make_static_room();
  if (ref == "highway_jam") return make_highway_jam();
  if (ref == "urban_parked") return make_urban_parked();
  return Scenario::load(ref);
}

int cmd_odometry(const CommonOpts& opts, const std::string& data, const std::string& out,
                 const std::string& mode_str, bool map_ply) {
  const RunConfig cfg = resolve_config(opts);
  const Mode mode = parse_mode(mode_str);
  const OdometryReport report = run_sequence(data, cfg, mode, out, map_ply);
  double ms = 0.0;
  int fallbacks = 0;
  for (const FrameResult& f : report.frames) {
    ms += f.ms_total;
    fallbacks += f.used_motion_prior ? 1 : 0;
  }
  const size_t n = report.frames.size();
  std::printf("processed %zu frames in %s mode (seed %llu)\n", n, report.mode.c_str(),
              static_cast<unsigned long long>(report.seed));
  if (n > 0) {
    std::printf("average %.1f ms/frame, %d motion-prior fallbacks\n", ms / n, fallbacks);
    std::printf("map: %zu surfels (%zu stable)\n", report.frames.back().map_size,
                report.frames.back().stable_surfels);
    std::printf("outputs under %s\n", out.c_str());
  } else {
    std::printf("no scans found; nothing written\n");
  }
  return 0;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& est_path, const std::string& gt_path,
                 const std::string& lengths_name, int stride, const std::string& calib_path,
                 const std::string& csv_path, const std::string& timeline_path) {
  resolve_config(opts);  // honors --print-config and validates --set
  Trajectory est = read_poses(est_path);
  const Trajectory gt = read_poses(gt_path);
  if (!calib_path.empty()) est = apply_calib(est, read_calib(calib_path));
  const std::vector<double>& lengths =
      lengths_name == "road" ? kRoadLengths : kOdometryLengths;
  const RelErrorReport report = relative_errors(est, gt, lengths, stride);
  std::fputs(format_report_table(report).c_str(), stdout);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    write_report_csv(report, out);
  }
  if (!timeline_path.empty()) {
    std::ofstream out(timeline_path);
    out << "frame,trans_err_m\n";
    const auto series = error_timeline(est, gt);
    for (size_t i = 0; i < series.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%zu,%.9f\n", i, series[i]);
      out << buf;
    }
  }
  return 0;
}

int cmd_refine_labels(const CommonOpts& opts, const std::string& data, const std::string& out,
                      int max_frames) {
  namespace fs = std::filesystem;
  const RunConfig cfg = resolve_config(opts);
  fs::create_directories(out);
  std::vector<fs::path> scans;
  for (const auto& entry : fs::directory_iterator(fs::path(data) / "velodyne"))
    if (entry.path().extension() == ".bin") scans.push_back(entry.path());
  std::sort(scans.begin(), scans.end());
  int done = 0;
  for (const fs::path& scan_path : scans) {
    if (max_frames >= 0 && done >= max_frames) break;
    Scan scan = read_scan(scan_path.string(), cfg);
    const fs::path label_path = fs::path(data) / "labels" / (scan_path.stem().string() + ".label");
    if (!fs::exists(label_path))
      throw std::runtime_error("refine-labels needs labels: " + label_path.string() + " not found");
    read_labels(label_path.string(), scan, cfg);
    FrameMaps maps = project(scan, cfg);
    const std::string stem = (fs::path(out) / scan_path.stem()).string();
    dump_label_pgm(maps, stem + "_labels_raw.pgm");
    dump_range_pgm(maps, stem + "_range.pgm", cfg.max_range);
    refine(maps, cfg);
    dump_label_pgm(maps, stem + "_labels_refined.pgm");
    ++done;
  }
  std::printf("wrote refined masks for %d frames under %s\n", done, out.c_str());
  return 0;
}

int cmd_export_map(const CommonOpts& opts, const std::string& data, const std::string& out,
                   const std::string& mode_str, const std::string& color_str, bool stable_only) {
  const RunConfig base = resolve_config(opts);
  const Mode mode = parse_mode(mode_str);
  ExportColor color = ExportColor::kClass;
  if (color_str == "normal") color = ExportColor::kNormal;
  else if (color_str == "gray") color = ExportColor::kGray;
  else if (color_str != "class")
    throw std::invalid_argument("unknown color scheme '" + color_str + "'");

  PipelineState state(base, mode);
  namespace fs = std::filesystem;
  std::vector<fs::path> scans;
  for (const auto& entry : fs::directory_iterator(fs::path(data) / "velodyne"))
    if (entry.path().extension() == ".bin") scans.push_back(entry.path());
  std::sort(scans.begin(), scans.end());
  for (const fs::path& scan_path : scans) {
    Scan scan = read_scan(scan_path.string(), state.cfg);
    if (mode != Mode::kGeometric) {
      const fs::path label_path =
          fs::path(data) / "labels" / (scan_path.stem().string() + ".label");
      if (!fs::exists(label_path))
        throw std::runtime_error(std::string(mode_name(mode)) +
                                 " mode needs labels: " + label_path.string() + " not found");
      read_labels(label_path.string(), scan, state.cfg);
    }
    process_frame(state, scan);
  }
  export_ply(state.map, out, stable_only ? ExportMode::kStableOnly : ExportMode::kAll, color,
             state.table, state.cfg);
  std::printf("wrote %s (%zu surfels%s)\n", out.c_str(),
              stable_only ? state.map.stable_count(state.cfg) : state.map.size(),
              stable_only ? " stable" : "");
  return 0;
}

int cmd_simulate_export(const CommonOpts& opts, const std::string& scenario_ref,
                        const std::string& out, double label_noise, uint64_t label_noise_seed) {
  const RunConfig cfg = resolve_config(opts);
  Scenario scn = load_scenario(scenario_ref);
  if (opts.seed_given) scn.seed = cfg.seed;
  export_scenario(scn, out, cfg, label_noise, label_noise_seed);
  std::printf("exported scenario '%s': %d frames under %s (seed %llu)\n", scn.name.c_str(),
              scn.frames, out.c_str(), static_cast<unsigned long long>(scn.seed));
  return 0;
}

int cmd_selftest(const CommonOpts& opts) {
  const RunConfig cfg = resolve_config(opts);
  int failures = 0;
  auto check = [&failures](bool ok, const char* name) {
    std::printf("%s — %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
  };

  {
    Scenario room = make_static_room();
    auto [a, pa] = simulate(room, 0, cfg);
    auto [b, pb] = simulate(room, 0, cfg);
    bool same = a.size() == b.size() && pa.matrix() == pb.matrix();
    for (size_t i = 0; same && i < a.size(); ++i)
      same = a.points[i] == b.points[i] && a.labels[i] == b.labels[i];
    check(same, "simulator determinism");
  }
  {
    Scenario room = make_static_room();
    room.sigma = 0.0;
    auto [scan, pose] = simulate(room, 0, cfg);
    FrameMaps maps = project(scan, cfg);
    check(maps.valid_vertex_count() == scan.size(), "projection reproduces the ray grid");
  }
  {
    Trajectory line;
    for (int i = 0; i < 200; ++i)
      line.poses.emplace_back(Mat3::Identity(), Vec3(1.5 * i, 0.0, 0.0));
    const RelErrorReport r = relative_errors(line, line, kRoadLengths);
    check(r.avg_trans_pct == 0.0 && r.avg_rot_deg_per_m == 0.0, "relative error of identity");
  }
  {
    Scenario room = make_static_room();
    room.sigma = 0.0;
    auto [scan, pose] = simulate(room, 0, cfg);
    const Scan noisy = corrupt_labels(scan, 0.10, 99);
    FrameMaps truth = project(scan, cfg);
    FrameMaps maps = project(noisy, cfg);
    size_t before = 0, after = 0, denom = 0;
    FrameMaps raw = maps;
    refine(maps, cfg);
    for (int i = 0; i < maps.width * maps.height; ++i) {
      if (!truth.vertex_valid[i] || truth.label[i] == 0) continue;
      ++denom;
      if (raw.label[i] != 0 && raw.label[i] != truth.label[i]) ++before;
      if (maps.label[i] != 0 && maps.label[i] != truth.label[i]) ++after;
    }
    check(denom > 0 && after < before, "mask refinement reduces label errors");
  }
  {
    const double l0 = odds(0.5) + odds(0.6);
    const double up = stability_update(l0, 0.0, 0.0, false, cfg);
    check(std::abs(up - (l0 + odds(0.6) - odds(0.5))) < 1e-12, "stability update arithmetic");
  }
  {
    Scenario room = make_static_room();
    room.frames = 5;
    PipelineState s1(cfg, Mode::kSemantic), s2(cfg, Mode::kSemantic);
    bool same = true;
    for (int f = 0; f < room.frames; ++f) {
      auto [scan, pose] = simulate(room, f, cfg);
      const FrameResult r1 = process_frame(s1, scan);
      const FrameResult r2 = process_frame(s2, scan);
      same = same && r1.pose.matrix() == r2.pose.matrix();
    }
    check(same, "pipeline determinism");
  }

  std::printf("%s: %d failure%s\n", failures == 0 ? "OK" : "NOT OK", failures,
              failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic surfel odometry and mapping"};
  app.require_subcommand(0, 1);

  CommonOpts opts;
  add_common(&app, opts);

  std::string data, out, mode_str = "semantic";
  bool map_ply = false;
  CLI::App* odo = app.add_subcommand("odometry", "run odometry over a dataset directory");
  add_common(odo, opts);
  odo->add_option("--data", data, "dataset directory (velodyne/ + labels/)")->required();
  odo->add_option("--out", out, "output directory")->required();
  odo->add_option("--mode", mode_str, "geometric | nomovable | semantic");
  odo->add_flag("--map-ply", map_ply, "also export the final surfel map");

  std::string est_path, gt_path, lengths_name = "odom", calib_path, csv_path, timeline_path;
  int stride = 1;
  CLI::App* eva = app.add_subcommand("evaluate", "relative pose error of est vs ground truth");
  add_common(eva, opts);
  eva->add_option("--est", est_path, "estimated poses file")->required();
  eva->add_option("--gt", gt_path, "ground-truth poses file")->required();
  eva->add_option("--lengths", lengths_name, "odom (100..800 m) or road (5..400 m)")
      ->check(CLI::IsMember({"odom", "road"}));
  eva->add_option("--stride", stride, "segment start spacing in frames");
  eva->add_option("--calib", calib_path, "calibration file conjugating the estimate");
  eva->add_option("--csv", csv_path, "also write the report as CSV");
  eva->add_option("--timeline", timeline_path, "also write per-frame errors as CSV");

  int max_frames = -1;
  CLI::App* ref = app.add_subcommand("refine-labels", "write refined label masks as images");
  add_common(ref, opts);
  ref->add_option("--data", data, "dataset directory (velodyne/ + labels/)")->required();
  ref->add_option("--out", out, "output directory for PGM dumps")->required();
  ref->add_option("--frames", max_frames, "stop after this many frames");

  std::string color_str = "class";
  bool stable_only = false;
  CLI::App* exp = app.add_subcommand("export-map", "run a dataset and export the surfel map");
  add_common(exp, opts);
  exp->add_option("--data", data, "dataset directory")->required();
  exp->add_option("--out", out, "output PLY path")->required();
  exp->add_option("--mode", mode_str, "geometric | nomovable | semantic");
  exp->add_option("--color", color_str, "class | normal | gray");
  exp->add_flag("--stable-only", stable_only, "export only stable surfels");

  std::string scenario_ref;
  double label_noise = 0.0;
  uint64_t label_noise_seed = 1;
  CLI::App* sim = app.add_subcommand("simulate-export", "render a scenario to dataset files");
  add_common(sim, opts);
  sim->add_option("--scenario", scenario_ref, "scenario file or built-in name")->required();
  sim->add_option("--out", out, "output dataset directory")->required();
  sim->add_option("--label-noise", label_noise, "fraction of labels to corrupt");
  sim->add_option("--label-noise-seed", label_noise_seed, "seed for label corruption");

  CLI::App* self = app.add_subcommand("selftest", "run the built-in invariant checks");
  add_common(self, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (odo->parsed()) return cmd_odometry(opts, data, out, mode_str, map_ply);
    if (eva->parsed())
      return cmd_evaluate(opts, est_path, gt_path, lengths_name, stride, calib_path, csv_path,
                          timeline_path);
    if (ref->parsed()) return cmd_refine_labels(opts, data, out, max_frames);
    if (exp->parsed()) return cmd_export_map(opts, data, out, mode_str, color_str, stable_only);
    if (sim->parsed())
      return cmd_simulate_export(opts, scenario_ref, out, label_noise, label_noise_seed);
    if (self->parsed()) return cmd_selftest(opts);
    // No subcommand: --print-config is still useful on its own.
    resolve_config(opts);
    if (!opts.print_config) std::fputs(app.help().c_str(), stdout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
