#include "ssom/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ssom {

const std::vector<double> kOdometryLengths = {100, 200, 300, 400, 500, 600, 700, 800};
const std::vector<double> kRoadLengths = {5, 10, 25, 50, 100, 150, 200, 250, 300, 350, 400};

namespace {

// Cumulative ground-truth path length per frame.
std::vector<double> path_lengths(const Trajectory& t) {
  std::vector<double> acc(t.size(), 0.0);
  for (size_t i = 1; i < t.size(); ++i)
    acc[i] = acc[i - 1] + (t[i].translation() - t[i - 1].translation()).norm();
  return acc;
}

}  // namespace

RelErrorReport relative_errors(const Trajectory& est, const Trajectory& gt,
                               const std::vector<double>& lengths, int stride) {
  if (est.size() != gt.size())
    throw std::invalid_argument("relative_errors: trajectory length mismatch (" +
                                std::to_string(est.size()) + " vs " + std::to_string(gt.size()) +
                                ")");
  if (gt.size() < 2) throw std::invalid_argument("relative_errors: need at least two poses");
  if (stride < 1) throw std::invalid_argument("relative_errors: stride must be positive");

  const std::vector<double> acc = path_lengths(gt);
  RelErrorReport report;
  report.stride = stride;

  for (double length : lengths) {
    LengthError agg;
    agg.length = length;
    for (size_t start = 0; start < gt.size(); start += static_cast<size_t>(stride)) {
      // First frame whose path length exceeds the start's by `length`.
      size_t end = start + 1;
      while (end < gt.size() && acc[end] <= acc[start] + length) ++end;
      if (end >= gt.size()) break;  // path exhausted; later starts only get shorter
      const double seg_len = acc[end] - acc[start];
      if (seg_len <= 0.0) continue;
      const Pose gt_rel = gt[start].inverse() * gt[end];
      const Pose est_rel = est[start].inverse() * est[end];
      const Pose err = gt_rel.inverse() * est_rel;
      agg.trans_pct += err.translation().norm() / seg_len * 100.0;
      agg.rot_deg_per_m += rad2deg(err.rotation_angle()) / seg_len;
      ++agg.samples;
    }
    if (agg.samples > 0) {
      report.avg_trans_pct += agg.trans_pct;
      report.avg_rot_deg_per_m += agg.rot_deg_per_m;
      report.total_samples += agg.samples;
      agg.trans_pct /= agg.samples;
      agg.rot_deg_per_m /= agg.samples;
      report.per_length.push_back(agg);
    } else {
      report.skipped_lengths.push_back(length);
    }
  }
  if (report.total_samples > 0) {
    report.avg_trans_pct /= report.total_samples;
    report.avg_rot_deg_per_m /= report.total_samples;
  }
  return report;
}

std::vector<double> error_timeline(const Trajectory& est, const Trajectory& gt, int window) {
  if (est.size() != gt.size())
    throw std::invalid_argument("error_timeline: trajectory length mismatch");
  if (window < 1) throw std::invalid_argument("error_timeline: window must be positive");
  std::vector<double> out;
  if (gt.size() <= static_cast<size_t>(window)) return out;
  out.reserve(gt.size() - window);
  for (size_t i = 0; i + window < gt.size(); ++i) {
    const Pose gt_rel = gt[i].inverse() * gt[i + window];
    const Pose est_rel = est[i].inverse() * est[i + window];
    out.push_back((gt_rel.inverse() * est_rel).translation().norm());
  }
  return out;
}

Trajectory apply_calib(const Trajectory& traj, const Pose& calib) {
  Trajectory out;
  out.poses.reserve(traj.size());
  const Pose inv = calib.inverse();
  for (const Pose& p : traj.poses) out.poses.push_back(calib * p * inv);
  return out;
}

void write_report_csv(const RelErrorReport& report, std::ostream& out) {
  out << "length_m,trans_pct,rot_deg_per_m,samples\n";
  char buf[96];
  for (const LengthError& e : report.per_length) {
    std::snprintf(buf, sizeof(buf), "%g,%.9f,%.9f,%d\n", e.length, e.trans_pct, e.rot_deg_per_m,
                  e.samples);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "avg,%.9f,%.9f,%d\n", report.avg_trans_pct,
                report.avg_rot_deg_per_m, report.total_samples);
  out << buf;
}

std::string format_report_table(const RelErrorReport& report) {
  std::string out;
  char buf[96];
  out += "length_m   trans_%   rot_deg/100m   samples\n";
  for (const LengthError& e : report.per_length) {
    std::snprintf(buf, sizeof(buf), "%8g   %7.2f   %12.4f   %7d\n", e.length, e.trans_pct,
                  e.rot_deg_per_m * 100.0, e.samples);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%8s   %7.2f   %12.4f   %7d\n", "avg", report.avg_trans_pct,
                report.avg_rot_deg_per_m * 100.0, report.total_samples);
  out += buf;
  for (double l : report.skipped_lengths) {
    std::snprintf(buf, sizeof(buf), "note: no segment reached %g m; length skipped\n", l);
    out += buf;
  }
  return out;
}

}  // namespace ssom
