#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ssom/geometry.hpp"
#include "ssom/kitti_io.hpp"

using namespace ssom;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const char* name) { return fs::temp_directory_path() / name; }

void write_bytes(const fs::path& p, const void* data, size_t n) {
  std::ofstream out(p, std::ios::binary);
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

}  // namespace

TEST_CASE("scan write/read round trip") {
  Scan scan;
  scan.points = {Vec3(1.0, 2.0, 3.0), Vec3(-4.5, 0.25, 10.0), Vec3(60.0, -1.0, 2.0)};
  scan.intensities = {0.1f, 0.5f, 0.9f};
  const fs::path p = tmp_file("ssom_io_scan.bin");
  write_scan(scan, p.string());
  CHECK(fs::file_size(p) == scan.size() * 16);

  RunConfig cfg;
  size_t dropped = 123;
  const Scan back = read_scan(p.string(), cfg, &dropped);
  REQUIRE(back.size() == scan.size());
  CHECK(dropped == 0);
  for (size_t i = 0; i < scan.size(); ++i) {
    CHECK(back.points[i].cast<float>() == scan.points[i].cast<float>());
    CHECK(back.intensities[i] == scan.intensities[i]);
  }
  CHECK_FALSE(back.has_labels());
  fs::remove(p);
}

TEST_CASE("scan read filters range and non-finite points") {
  const float rows[5][4] = {
      {0.1f, 0.0f, 0.0f, 0.0f},                                   // below min range
      {5.0f, 0.0f, 0.0f, 0.2f},                                   // keep
      {200.0f, 0.0f, 0.0f, 0.0f},                                 // beyond max range
      {std::numeric_limits<float>::quiet_NaN(), 0.0f, 0.0f, 0.0f},// not finite
      {0.0f, -7.0f, 1.0f, 0.4f},                                  // keep
  };
  const fs::path p = tmp_file("ssom_io_filter.bin");
  write_bytes(p, rows, sizeof rows);

  RunConfig cfg;
  size_t dropped = 0;
  const Scan scan = read_scan(p.string(), cfg, &dropped);
  CHECK(scan.size() == 2);
  CHECK(dropped == 3);
  CHECK(scan.points[0].x() == 5.0);
  CHECK(scan.points[1].y() == -7.0);
  fs::remove(p);
}

TEST_CASE("scan read rejects bad files") {
  RunConfig cfg;
  CHECK_THROWS(read_scan(tmp_file("ssom_io_absent.bin").string(), cfg));
  const fs::path p = tmp_file("ssom_io_ragged.bin");
  const char junk[10] = {};
  write_bytes(p, junk, sizeof junk);  // not a multiple of 16
  CHECK_THROWS(read_scan(p.string(), cfg));
  fs::remove(p);
}

TEST_CASE("labels keep the low 16 bits and default confidences") {
  Scan scan;
  scan.points = {Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  scan.intensities = {0, 0, 0};

  const uint32_t raw[3] = {10u, (7u << 16) | 50u, 0u};  // instance id in the high bits
  const fs::path p = tmp_file("ssom_io_lab.label");
  write_bytes(p, raw, sizeof raw);

  RunConfig cfg;
  read_labels(p.string(), scan, cfg);
  CHECK(scan.labels == std::vector<ClassId>{10, 50, 0});
  CHECK(scan.confidences ==
        std::vector<float>(3, static_cast<float>(cfg.default_confidence)));

  // Count mismatch is an error.
  scan.points.push_back(Vec3(4, 0, 0));
  scan.intensities.push_back(0.0f);
  CHECK_THROWS(read_labels(p.string(), scan, cfg));
  fs::remove(p);
}

TEST_CASE("sibling probability file overrides default confidence") {
  Scan scan;
  scan.points = {Vec3(1, 0, 0), Vec3(2, 0, 0)};
  scan.intensities = {0, 0};
  const uint32_t raw[2] = {10u, 11u};
  const float probs[2] = {0.25f, 0.75f};
  const fs::path p = tmp_file("ssom_io_prob.label");
  const fs::path pp = tmp_file("ssom_io_prob.prob");
  write_bytes(p, raw, sizeof raw);
  write_bytes(pp, probs, sizeof probs);

  RunConfig cfg;
  read_labels(p.string(), scan, cfg);
  CHECK(scan.confidences == std::vector<float>{0.25f, 0.75f});
  fs::remove(p);
  fs::remove(pp);
}

TEST_CASE("label write/read round trip") {
  Scan scan;
  scan.points = {Vec3(1, 0, 0), Vec3(2, 0, 0)};
  scan.intensities = {0, 0};
  scan.labels = {40, 252};
  scan.confidences = {0.8f, 0.8f};
  const fs::path p = tmp_file("ssom_io_roundtrip.label");
  write_labels(scan, p.string());
  Scan back = scan;
  back.labels.clear();
  back.confidences.clear();
  RunConfig cfg;
  read_labels(p.string(), back, cfg);
  CHECK(back.labels == scan.labels);
  fs::remove(p);
}

TEST_CASE("pose files round trip at high precision") {
  Trajectory traj;
  traj.poses.emplace_back(Mat3::Identity(), Vec3::Zero());
  traj.poses.emplace_back(exp_so3(Vec3(0.01, -0.02, 0.3)), Vec3(1.25, -3.5, 0.125));
  traj.poses.emplace_back(exp_so3(Vec3(0.0, 0.0, 1.1)), Vec3(100.0, 0.5, -2.0));

  const fs::path p = tmp_file("ssom_io_poses.txt");
  write_poses(traj, p.string());
  const Trajectory back = read_poses(p.string());
  REQUIRE(back.size() == traj.size());
  for (size_t i = 0; i < traj.size(); ++i) {
    CHECK((back[i].rotation() - traj[i].rotation()).norm() < 1e-11);
    CHECK((back[i].translation() - traj[i].translation()).norm() < 1e-11);
  }
  fs::remove(p);
}

TEST_CASE("pose parsing validates shape") {
  const fs::path p = tmp_file("ssom_io_badposes.txt");
  {
    std::ofstream out(p);
    out << "1 0 0 0 0 1 0 0 0 0 1\n";  // 11 values
  }
  CHECK_THROWS(read_poses(p.string()));
  fs::remove(p);
}

TEST_CASE("calib parsing finds the Tr line") {
  const fs::path p = tmp_file("ssom_io_calib.txt");
  {
    std::ofstream out(p);
    out << "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n";
    out << "Tr: 0 -1 0 0.5 0 0 -1 0.25 1 0 0 -0.125\n";
  }
  const Pose tr = read_calib(p.string());
  CHECK(tr.translation() == Vec3(0.5, 0.25, -0.125));
  CHECK(tr.rotation()(0, 1) == -1.0);
  CHECK(tr.rotation()(2, 0) == 1.0);
  fs::remove(p);

  const fs::path q = tmp_file("ssom_io_nocalib.txt");
  {
    std::ofstream out(q);
    out << "P0: 1 2 3\n";
  }
  CHECK_THROWS(read_calib(q.string()));
  fs::remove(q);
}
