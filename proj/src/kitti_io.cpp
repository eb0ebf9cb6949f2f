#include "ssom/kitti_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ssom {

namespace {

std::vector<char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  const auto n = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<char> bytes(static_cast<size_t>(n));
  if (n > 0) in.read(bytes.data(), n);
  if (!in) throw std::runtime_error("short read on '" + path + "'");
  return bytes;
}

}  // namespace

Scan read_scan(const std::string& path, const RunConfig& cfg, size_t* dropped) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 16 != 0)
    throw std::runtime_error("'" + path + "': size " + std::to_string(bytes.size()) +
                             " is not a multiple of 16 bytes");
  const size_t n = bytes.size() / 16;
  Scan scan;
  scan.points.reserve(n);
  scan.intensities.reserve(n);
  size_t drop = 0;
  for (size_t i = 0; i < n; ++i) {
    float v[4];
    std::memcpy(v, bytes.data() + 16 * i, 16);
    const bool finite = std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]) &&
                        std::isfinite(v[3]);
    if (!finite) {
      ++drop;
      continue;
    }
    const double r = std::sqrt(double(v[0]) * v[0] + double(v[1]) * v[1] + double(v[2]) * v[2]);
    if (r < cfg.min_range || r > cfg.max_range) {
      ++drop;
      continue;
    }
    scan.points.emplace_back(v[0], v[1], v[2]);
    scan.intensities.push_back(v[3]);
  }
  if (dropped) *dropped = drop;
  if (drop > 0)
    std::cerr << "read_scan: dropped " << drop << " of " << n << " points from '" << path
              << "' (non-finite or outside range limits)\n";
  return scan;
}

void write_scan(const Scan& scan, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (size_t i = 0; i < scan.size(); ++i) {
    float v[4] = {static_cast<float>(scan.points[i].x()), static_cast<float>(scan.points[i].y()),
                  static_cast<float>(scan.points[i].z()),
                  i < scan.intensities.size() ? scan.intensities[i] : 0.0f};
    out.write(reinterpret_cast<const char*>(v), 16);
  }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

void read_labels(const std::string& path, Scan& scan, const RunConfig& cfg) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 4 != 0)
    throw std::runtime_error("'" + path + "': size is not a multiple of 4 bytes");
  const size_t n = bytes.size() / 4;
  if (n != scan.size())
    throw std::runtime_error("'" + path + "': " + std::to_string(n) + " labels for " +
                             std::to_string(scan.size()) + " points");
  scan.labels.resize(n);
  for (size_t i = 0; i < n; ++i) {
    uint32_t raw;
    std::memcpy(&raw, bytes.data() + 4 * i, 4);
    scan.labels[i] = static_cast<ClassId>(raw & 0xFFFFu);
  }
  scan.confidences.assign(n, static_cast<float>(cfg.default_confidence));
  std::filesystem::path prob_path(path);
  prob_path.replace_extension(".prob");
  if (std::filesystem::exists(prob_path)) {
    const auto pb = read_file_bytes(prob_path.string());
    if (pb.size() != 4 * n)
      throw std::runtime_error("'" + prob_path.string() + "': probability count mismatch");
    for (size_t i = 0; i < n; ++i) {
      float p;
      std::memcpy(&p, pb.data() + 4 * i, 4);
      scan.confidences[i] = p;
    }
  }
}

void write_labels(const Scan& scan, const std::string& path) {
  if (!scan.has_labels()) throw std::runtime_error("write_labels: scan carries no labels");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (size_t i = 0; i < scan.labels.size(); ++i) {
    const uint32_t raw = scan.labels[i];
    out.write(reinterpret_cast<const char*>(&raw), 4);
  }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

Trajectory read_poses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Trajectory traj;
  std::string line;
  int lineno = 0;
  bool warned = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream row(line);
    double v[12];
    for (int i = 0; i < 12; ++i)
      if (!(row >> v[i]))
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected 12 values per pose line");
    std::string extra;
    if (row >> extra)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 12 values per pose line");
    Mat3 r;
    r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
    Pose p(r, Vec3(v[3], v[7], v[11]));
    if (p.orthonormality_error() > 1e-6) {
      if (!warned) {
        std::cerr << "read_poses: re-orthonormalizing rotations in '" << path
                  << "' (first drift at line " << lineno << ")\n";
        warned = true;
      }
      p.orthonormalize();
    }
    traj.poses.push_back(p);
  }
  return traj;
}

void write_poses(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  char buf[32];
  for (const Pose& p : traj.poses) {
    const Mat3& r = p.rotation();
    const Vec3& t = p.translation();
    const double v[12] = {r(0, 0), r(0, 1), r(0, 2), t.x(),  r(1, 0), r(1, 1),
                          r(1, 2), t.y(),   r(2, 0), r(2, 1), r(2, 2), t.z()};
    for (int i = 0; i < 12; ++i) {
      std::snprintf(buf, sizeof(buf), "%.12e", v[i]);
      out << buf << (i == 11 ? "\n" : " ");
    }
  }
  if (!out) throw std::runtime_error("write failed on '" + path + "'");
}

Pose read_calib(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag)) continue;
    std::vector<double> v;
    const bool tagged = tag.back() == ':';
    if (!tagged) {
      // untagged file: the line itself is the transform
      row.clear();
      row.seekg(0);
    }
    double x;
    while (row >> x) v.push_back(x);
    if ((tagged && tag == "Tr:" && v.size() == 12) || (!tagged && v.size() == 12)) {
      Mat3 r;
      r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
      Pose p(r, Vec3(v[3], v[7], v[11]));
      if (p.orthonormality_error() > 1e-6) p.orthonormalize();
      return p;
    }
  }
  throw std::runtime_error("'" + path + "': no 12-value 'Tr:' transform found");
}

}  // namespace ssom
