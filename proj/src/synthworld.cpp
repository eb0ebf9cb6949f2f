#include "ssom/synthworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ssom/kitti_io.hpp"
#include "ssom/parallel.hpp"

namespace ssom {

namespace {

Mat3 yaw_rot(double yaw_deg) {
  return Eigen::AngleAxisd(deg2rad(yaw_deg), Vec3::UnitZ()).toRotationMatrix();
}

// splitmix64; decorrelates (seed, frame, row) into an engine seed.
uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Slab test against a yawed box; origin/dir given in the box's parent frame.
// Returns the hit range, or -1 when the ray misses (or starts inside).
double ray_box(const Vec3& origin, const Vec3& dir, const SceneBox& box) {
  const Mat3 rt = yaw_rot(box.yaw_deg).transpose();
  const Vec3 o = rt * (origin - box.center);
  const Vec3 d = rt * dir;
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    if (std::abs(d[k]) < 1e-12) {
      if (std::abs(o[k]) > box.half[k]) return -1.0;
      continue;
    }
    double t1 = (-box.half[k] - o[k]) / d[k];
    double t2 = (box.half[k] - o[k]) / d[k];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return -1.0;
  }
  return tmin > 1e-9 ? tmin : -1.0;
}

bool box_contains(const SceneBox& box, const Vec3& p, double inflate) {
  const Vec3 q = yaw_rot(box.yaw_deg).transpose() * (p - box.center);
  return std::abs(q.x()) <= box.half.x() + inflate && std::abs(q.y()) <= box.half.y() + inflate &&
         std::abs(q.z()) <= box.half.z() + inflate;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& value, size_t expect, const std::string& where) {
  std::istringstream in(value);
  std::vector<double> out;
  double x;
  while (in >> x) out.push_back(x);
  std::string rest;
  if (!(in >> rest) && out.size() == expect) return out;
  throw std::invalid_argument(where + ": expected " + std::to_string(expect) + " numeric fields, got '" +
                              value + "'");
}

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

Pose Mover::pose_at(int frame) const {
  const double f = static_cast<double>(frame);
  return Pose(yaw_rot(yaw0_deg + yaw_rate_deg * f), pos0 + vel * f);
}

Pose Scenario::sensor_pose(int frame) const {
  const double f = static_cast<double>(frame);
  return Pose(yaw_rot(sensor_yaw0_deg + sensor_yaw_rate_deg * f), sensor_pos0 + sensor_vel * f);
}

bool operator==(const SceneBox& a, const SceneBox& b) {
  return a.label == b.label && a.center == b.center && a.half == b.half && a.yaw_deg == b.yaw_deg;
}

bool operator==(const Mover& a, const Mover& b) {
  return a.box == b.box && a.pos0 == b.pos0 && a.yaw0_deg == b.yaw0_deg && a.vel == b.vel &&
         a.yaw_rate_deg == b.yaw_rate_deg;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.frames == b.frames && a.sigma == b.sigma && a.seed == b.seed &&
         a.statics == b.statics && a.movers == b.movers && a.sensor_pos0 == b.sensor_pos0 &&
         a.sensor_yaw0_deg == b.sensor_yaw0_deg && a.sensor_vel == b.sensor_vel &&
         a.sensor_yaw_rate_deg == b.sensor_yaw_rate_deg;
}

Scenario Scenario::parse(std::istream& in, const std::string& origin) {
  Scenario scn;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      scn.name = value;
    } else if (key == "frames") {
      scn.frames = static_cast<int>(parse_numbers(value, 1, where)[0]);
    } else if (key == "sigma") {
      scn.sigma = parse_numbers(value, 1, where)[0];
    } else if (key == "seed") {
      scn.seed = static_cast<uint64_t>(parse_numbers(value, 1, where)[0]);
    } else if (key == "sensor_start") {
      const auto n = parse_numbers(value, 4, where);
      scn.sensor_pos0 = Vec3(n[0], n[1], n[2]);
      scn.sensor_yaw0_deg = n[3];
    } else if (key == "sensor_vel") {
      const auto n = parse_numbers(value, 4, where);
      scn.sensor_vel = Vec3(n[0], n[1], n[2]);
      scn.sensor_yaw_rate_deg = n[3];
    } else if (key == "box") {
      const auto n = parse_numbers(value, 8, where);
      SceneBox b;
      b.label = static_cast<ClassId>(n[0]);
      b.center = Vec3(n[1], n[2], n[3]);
      b.half = Vec3(n[4], n[5], n[6]);
      b.yaw_deg = n[7];
      scn.statics.push_back(b);
    } else if (key == "mover") {
      const auto n = parse_numbers(value, 12, where);
      Mover m;
      m.box.label = static_cast<ClassId>(n[0]);
      m.box.half = Vec3(n[1], n[2], n[3]);
      m.pos0 = Vec3(n[4], n[5], n[6]);
      m.yaw0_deg = n[7];
      m.vel = Vec3(n[8], n[9], n[10]);
      m.yaw_rate_deg = n[11];
      scn.movers.push_back(m);
    } else {
      throw std::invalid_argument(where + ": unknown scenario key '" + key + "'");
    }
  }
  if (scn.frames <= 0) throw std::invalid_argument(origin + ": scenario needs frames > 0");
  return scn;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return parse(in, path);
}

std::string Scenario::to_string() const {
  std::string out;
  out += "name = " + name + "\n";
  out += "frames = " + std::to_string(frames) + "\n";
  out += "sigma = ";
  append_num(out, sigma);
  out += "\nseed = " + std::to_string(seed) + "\n";
  out += "sensor_start =";
  for (double v : {sensor_pos0.x(), sensor_pos0.y(), sensor_pos0.z(), sensor_yaw0_deg}) {
    out += ' ';
    append_num(out, v);
  }
  out += "\nsensor_vel =";
  for (double v : {sensor_vel.x(), sensor_vel.y(), sensor_vel.z(), sensor_yaw_rate_deg}) {
    out += ' ';
    append_num(out, v);
  }
  out += '\n';
  for (const SceneBox& b : statics) {
    out += "box = " + std::to_string(b.label);
    for (double v : {b.center.x(), b.center.y(), b.center.z(), b.half.x(), b.half.y(), b.half.z(),
                     b.yaw_deg}) {
      out += ' ';
      append_num(out, v);
    }
    out += '\n';
  }
  for (const Mover& m : movers) {
    out += "mover = " + std::to_string(m.box.label);
    for (double v : {m.box.half.x(), m.box.half.y(), m.box.half.z(), m.pos0.x(), m.pos0.y(),
                     m.pos0.z(), m.yaw0_deg, m.vel.x(), m.vel.y(), m.vel.z(), m.yaw_rate_deg}) {
      out += ' ';
      append_num(out, v);
    }
    out += '\n';
  }
  return out;
}

std::pair<Scan, Pose> simulate(const Scenario& scn, int frame, const RunConfig& cfg) {
  if (frame < 0 || frame >= scn.frames)
    throw std::out_of_range("simulate: frame " + std::to_string(frame) + " outside horizon of " +
                            std::to_string(scn.frames));
  const Pose pose = scn.sensor_pose(frame);
  const Mat3 r = pose.rotation();
  const Vec3 origin = pose.translation();

  // Movers posed for this frame, expressed as world-frame boxes the ray test
  // can consume directly (box yaw composes with the trajectory yaw).
  std::vector<SceneBox> frame_boxes = scn.statics;
  for (const Mover& m : scn.movers) {
    const Pose pm = m.pose_at(frame);
    SceneBox b = m.box;
    b.center = pm * b.center;
    b.yaw_deg += m.yaw0_deg + m.yaw_rate_deg * static_cast<double>(frame);
    frame_boxes.push_back(b);
  }

  const int w = cfg.width;
  const int h = cfg.height;
  const double fov_up = deg2rad(cfg.fov_up_deg);
  const double fov_down = deg2rad(cfg.fov_down_deg);
  const double span = fov_up - fov_down;

  std::vector<double> range(static_cast<size_t>(w) * h, -1.0);
  std::vector<Vec3> dirs(static_cast<size_t>(w) * h);
  std::vector<ClassId> labels(static_cast<size_t>(w) * h, 0);

  parallel_for(0, h, cfg.threads, [&](int v) {
    std::mt19937_64 rng(mix_seed(scn.seed, static_cast<uint64_t>(frame), static_cast<uint64_t>(v)));
    std::normal_distribution<double> gauss(0.0, scn.sigma > 0.0 ? scn.sigma : 1.0);
    const double pitch = fov_down + span * (1.0 - (v + 0.5) / h);
    const double cp = std::cos(pitch);
    const double sp = std::sin(pitch);
    for (int u = 0; u < w; ++u) {
      const double yaw = M_PI * (1.0 - 2.0 * (u + 0.5) / w);
      const Vec3 dir_s(cp * std::cos(yaw), cp * std::sin(yaw), sp);
      const Vec3 dir_w = r * dir_s;
      double best = std::numeric_limits<double>::infinity();
      ClassId best_label = 0;
      for (const SceneBox& b : frame_boxes) {
        const double t = ray_box(origin, dir_w, b);
        if (t > 0.0 && t < best) {
          best = t;
          best_label = b.label;
        }
      }
      if (!std::isfinite(best)) continue;
      double t = best;
      if (scn.sigma > 0.0) t += gauss(rng);
      if (t < cfg.min_range || t > cfg.max_range) continue;
      const size_t i = static_cast<size_t>(v) * w + u;
      range[i] = t;
      dirs[i] = dir_s;
      labels[i] = best_label;
    }
  });

  Scan scan;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const size_t i = static_cast<size_t>(v) * w + u;
      if (range[i] < 0.0) continue;
      scan.points.push_back(dirs[i] * range[i]);
      scan.intensities.push_back(0.0f);
      scan.labels.push_back(labels[i]);
      scan.confidences.push_back(static_cast<float>(cfg.default_confidence));
    }
  }
  return {std::move(scan), pose};
}

Scan corrupt_labels(const Scan& scan, double error_rate, uint64_t seed) {
  if (error_rate < 0.0 || error_rate > 1.0)
    throw std::invalid_argument("corrupt_labels: error_rate outside [0, 1]");
  std::vector<ClassId> palette(scan.labels.begin(), scan.labels.end());
  std::sort(palette.begin(), palette.end());
  palette.erase(std::unique(palette.begin(), palette.end()), palette.end());
  if (!palette.empty() && palette.front() == 0) palette.erase(palette.begin());

  Scan out = scan;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (size_t i = 0; i < out.labels.size(); ++i) {
    if (coin(rng) >= error_rate) continue;
    const ClassId cur = out.labels[i];
    size_t candidates = palette.size();
    for (ClassId p : palette)
      if (p == cur) --candidates;
    if (candidates == 0) {
      out.labels[i] = cur == 1 ? 2 : 1;
      continue;
    }
    std::uniform_int_distribution<size_t> pick(0, candidates - 1);
    size_t k = pick(rng);
    for (ClassId p : palette) {
      if (p == cur) continue;
      if (k == 0) {
        out.labels[i] = p;
        break;
      }
      --k;
    }
  }
  return out;
}

bool in_mover_volume(const Scenario& scn, const Vec3& p, double inflate) {
  const double f_last = static_cast<double>(scn.frames - 1);
  for (const Mover& m : scn.movers) {
    if (m.yaw_rate_deg == 0.0) {
      // Constant heading: the box-frame coordinate is affine in the frame
      // index, q(f) = a - b f, so each axis slab |q_k| <= h_k + inflate is an
      // interval in f. Intersect them with [0, frames-1] and test whether the
      // result contains an integer.
      const Mat3 rbt = yaw_rot(m.box.yaw_deg).transpose();
      const Mat3 rwt = rbt * yaw_rot(m.yaw0_deg).transpose();
      const Vec3 a = rwt * (p - m.pos0) - rbt * m.box.center;
      const Vec3 b = rwt * m.vel;
      double lo = 0.0, hi = f_last;
      bool empty = false;
      for (int k = 0; k < 3 && !empty; ++k) {
        const double h = m.box.half[k] + inflate;
        if (b[k] == 0.0) {
          if (std::abs(a[k]) > h) empty = true;
          continue;
        }
        double t1 = (a[k] - h) / b[k];
        double t2 = (a[k] + h) / b[k];
        if (t1 > t2) std::swap(t1, t2);
        lo = std::max(lo, t1);
        hi = std::min(hi, t2);
        if (lo > hi) empty = true;
      }
      if (!empty && std::ceil(lo) <= std::floor(hi)) return true;
      continue;
    }
    for (int f = 0; f < scn.frames; ++f) {
      const Pose pm = m.pose_at(f);
      const Vec3 q = pm.rotation().transpose() * (p - pm.translation());
      if (box_contains(m.box, q, inflate)) return true;
    }
  }
  return false;
}

void export_scenario(const Scenario& scn, const std::string& out_dir, const RunConfig& cfg,
                     double label_error_rate, uint64_t label_error_seed) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "velodyne");
  fs::create_directories(fs::path(out_dir) / "labels");
  Trajectory traj;
  for (int f = 0; f < scn.frames; ++f) {
    auto [scan, pose] = simulate(scn, f, cfg);
    if (label_error_rate > 0.0)
      scan = corrupt_labels(scan, label_error_rate, label_error_seed + static_cast<uint64_t>(f));
    char stem[16];
    std::snprintf(stem, sizeof(stem), "%06d", f);
    write_scan(scan, (fs::path(out_dir) / "velodyne" / (std::string(stem) + ".bin")).string());
    write_labels(scan, (fs::path(out_dir) / "labels" / (std::string(stem) + ".label")).string());
    traj.poses.push_back(pose);
  }
  write_poses(traj, (fs::path(out_dir) / "poses.txt").string());
}

Scenario make_static_room() {
  Scenario scn;
  scn.name = "static_room";
  scn.frames = 60;
  scn.sigma = 0.01;
  scn.seed = 42;
  scn.statics = {
      {40, {0.0, 0.0, -0.05}, {12.5, 9.5, 0.05}, 0.0},    // floor
      {50, {12.1, 0.0, 1.5}, {0.1, 9.4, 1.5}, 0.0},       // walls
      {50, {-12.1, 0.0, 1.5}, {0.1, 9.4, 1.5}, 0.0},
      {50, {0.0, 9.1, 1.5}, {12.4, 0.1, 1.5}, 0.0},
      {50, {0.0, -9.1, 1.5}, {12.4, 0.1, 1.5}, 0.0},
      {70, {5.0, 3.0, 0.9}, {0.9, 0.7, 0.9}, 20.0},       // interior clutter
      {71, {-4.5, 4.5, 1.1}, {0.5, 0.5, 1.1}, -35.0},
      {80, {6.5, -5.0, 1.3}, {0.2, 0.2, 1.3}, 0.0},
      {81, {-6.5, -3.5, 1.0}, {0.8, 0.15, 1.0}, 55.0},
      {99, {1.5, -6.0, 0.7}, {1.1, 0.8, 0.7}, -10.0},
      {51, {-1.5, 6.3, 0.8}, {1.3, 0.3, 0.8}, 75.0},
  };
  scn.sensor_pos0 = Vec3(-6.0, -4.0, 1.0);
  scn.sensor_yaw0_deg = 15.0;
  scn.sensor_vel = Vec3(0.12, 0.07, 0.0);
  scn.sensor_yaw_rate_deg = 0.4;
  return scn;
}

Scenario make_highway_jam() {
  Scenario scn;
  scn.name = "highway_jam";
  scn.frames = 100;
  scn.sigma = 0.005;
  scn.seed = 42;

  scn.statics.push_back({40, {30.0, 0.0, -0.05}, {130.0, 12.5, 0.05}, 0.0});  // roadway
  // Noise barriers and median rails are zig-zag walls: the alternating yaw
  // keeps long smooth surfaces from being invariant along the road direction.
  for (int i = 0; i < 33; ++i) {
    const double x = -98.0 + 8.0 * i;
    const double yaw = (i % 2 == 0) ? 7.0 : -7.0;
    scn.statics.push_back({51, {x, -11.8, 0.9}, {4.4, 0.1, 0.9}, yaw});
    scn.statics.push_back({51, {x, 11.8, 0.9}, {4.4, 0.1, 0.9}, -yaw});
    scn.statics.push_back({51, {x, -1.9, 0.55}, {4.4, 0.08, 0.55}, -yaw});
    scn.statics.push_back({51, {x, 1.9, 0.55}, {4.4, 0.08, 0.55}, yaw});
  }
  for (int i = 0; i < 10; ++i) {  // light poles, staggered on both shoulders
    scn.statics.push_back(
        {80, {-20.0 + 12.0 * i, 10.8, 2.0}, {0.12, 0.12, 2.0}, 0.0});
    scn.statics.push_back(
        {80, {-14.0 + 12.0 * i, -10.8, 2.0}, {0.12, 0.12, 2.0}, 0.0});
  }
  for (int i = 0; i < 4; ++i)  // sign boards facing traffic
    scn.statics.push_back({81, {-5.0 + 30.0 * i, 10.2, 2.6}, {0.08, 0.9, 0.5}, 0.0});

  scn.sensor_pos0 = Vec3(0.0, 0.0, 1.2);
  scn.sensor_yaw0_deg = 0.0;
  scn.sensor_vel = Vec3(0.30, 0.0, 0.0);
  scn.sensor_yaw_rate_deg = 0.0;

  auto add_mover = [&scn](ClassId label, const Vec3& half, const Vec3& pos0, double yaw_deg,
                          double vx) {
    Mover m;
    m.box.label = label;
    m.box.half = half;
    m.pos0 = pos0;
    m.yaw0_deg = yaw_deg;
    m.vel = Vec3(vx, 0.0, 0.0);
    scn.movers.push_back(m);
  };

  // Own lane: tall trucks boxed ahead of and behind the sensor. The skewed
  // yaw keeps every face sweeping sideways through space as they creep, and
  // the bodies ride on a ground clearance.
  add_mover(18, {4.5, 1.3, 2.2}, {14.0, 0.0, 2.5}, 12.0, 0.35);
  add_mover(18, {4.4, 1.25, 2.15}, {34.0, 0.0, 2.45}, -12.0, 0.35);
  add_mover(18, {4.5, 1.3, 2.2}, {-13.0, 0.0, 2.5}, -12.0, 0.25);
  // Adjacent jam lanes, creeping at mixed speeds.
  add_mover(18, {4.2, 1.25, 2.1}, {6.0, 3.6, 2.4}, 12.0, 0.34);
  add_mover(20, {2.6, 1.05, 1.4}, {-6.0, 3.6, 1.7}, -12.0, 0.36);
  add_mover(18, {4.4, 1.3, 2.15}, {22.0, 3.6, 2.45}, -12.0, 0.33);
  add_mover(20, {2.4, 1.0, 1.35}, {36.0, 3.6, 1.65}, 12.0, 0.35);
  add_mover(18, {4.3, 1.3, 2.2}, {9.0, -3.6, 2.5}, -12.0, 0.34);
  add_mover(20, {2.5, 1.0, 1.3}, {-4.0, -3.6, 1.6}, 12.0, 0.36);
  add_mover(18, {4.6, 1.35, 2.25}, {25.0, -3.6, 2.55}, 12.0, 0.32);
  // Free-flowing outer lanes: cars overtaking from behind, sizes jittered so
  // successive cars never resume a predecessor's surfaces.
  uint64_t s = 1234;
  auto jitter = [&s]() {
    s = mix_seed(s, 1, 2);
    return (static_cast<double>(s >> 11) / 9007199254740992.0) * 2.0 - 1.0;
  };
  for (int i = 0; i < 8; ++i) {
    const Vec3 half(1.9 + 0.3 * jitter(), 0.85 + 0.12 * jitter(), 0.72 + 0.2 * jitter());
    add_mover(10, half, {-30.0 - 14.0 * i, -7.2, half.z() + 0.3}, 0.0, 1.5);
  }
  for (int i = 0; i < 8; ++i) {
    const Vec3 half(1.9 + 0.3 * jitter(), 0.85 + 0.12 * jitter(), 0.72 + 0.2 * jitter());
    add_mover(10, half, {-24.0 - 14.0 * i, 7.2, half.z() + 0.3}, 0.0, 1.45);
  }
  return scn;
}

Scenario make_urban_parked() {
  Scenario scn;
  scn.name = "urban_parked";
  scn.frames = 80;
  scn.sigma = 0.003;
  scn.seed = 7;

  scn.statics.push_back({40, {0.0, 0.0, -0.05}, {70.0, 25.0, 0.05}, 0.0});   // ground
  scn.statics.push_back({50, {0.0, 12.3, 4.0}, {46.0, 0.3, 4.0}, 0.0});      // street walls
  scn.statics.push_back({50, {0.0, -12.3, 4.0}, {46.0, 0.3, 4.0}, 0.0});
  // Parked cars along both curbs: movable class, static placement.
  for (int i = 0; i < 9; ++i) {
    const double x = -28.0 + 8.0 * i;
    const double yaw = (i % 2 == 0) ? 4.0 : -4.0;
    scn.statics.push_back({10, {x, 4.2, 0.72}, {1.95, 0.85, 0.72}, yaw});
    scn.statics.push_back({10, {x + 3.0, -4.2, 0.72}, {1.95, 0.85, 0.72}, -yaw});
  }

  scn.sensor_pos0 = Vec3(-22.0, 0.8, 1.3);
  scn.sensor_yaw0_deg = 0.0;
  scn.sensor_vel = Vec3(0.35, 0.0, 0.0);
  scn.sensor_yaw_rate_deg = 0.0;
  return scn;
}

}  // namespace ssom
