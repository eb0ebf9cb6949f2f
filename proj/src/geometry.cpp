#include "ssom/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace ssom {

Pose Pose::from_matrix(const Mat4& m) {
  if (m.row(3) != Eigen::RowVector4d(0, 0, 0, 1))
    throw std::invalid_argument("pose matrix bottom row must be [0 0 0 1]");
  Pose p(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
  if (p.orthonormality_error() > 1e-3)
    throw std::invalid_argument("pose rotation block is not orthonormal");
  return p;
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = r_;
  m.topRightCorner<3, 1>() = t_;
  return m;
}

double Pose::orthonormality_error() const {
  return (r_.transpose() * r_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

void Pose::orthonormalize() {
  Eigen::JacobiSVD<Mat3> svd(r_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU(), v = svd.matrixV();
  Mat3 s = Mat3::Identity();
  s(2, 2) = (u * v.transpose()).determinant() < 0 ? -1.0 : 1.0;
  r_ = u * s * v.transpose();
}

double Pose::rotation_angle() const { return std::abs(Eigen::AngleAxisd(r_).angle()); }

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Mat3 exp_so3(const Vec3& w) {
  const double th2 = w.squaredNorm();
  const Mat3 wx = skew(w);
  double a, b;  // sin(th)/th and (1-cos(th))/th^2
  if (th2 < 1e-16) {
    a = 1.0 - th2 / 6.0;
    b = 0.5 - th2 / 24.0;
  } else {
    const double th = std::sqrt(th2);
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / th2;
  }
  return Mat3::Identity() + a * wx + b * wx * wx;
}

Vec3 log_so3(const Mat3& r) {
  Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

Pose exp_se3(const Vec6& xi) {
  const Vec3 rho = xi.head<3>();
  const Vec3 phi = xi.tail<3>();
  const double th2 = phi.squaredNorm();
  const Mat3 px = skew(phi);
  double b, c;  // (1-cos)/th^2 and (th-sin)/th^3
  if (th2 < 1e-16) {
    b = 0.5 - th2 / 24.0;
    c = 1.0 / 6.0 - th2 / 120.0;
  } else {
    const double th = std::sqrt(th2);
    b = (1.0 - std::cos(th)) / th2;
    c = (th - std::sin(th)) / (th2 * th);
  }
  const Mat3 v = Mat3::Identity() + b * px + c * px * px;
  return Pose(exp_so3(phi), v * rho);
}

Vec6 log_se3(const Pose& t) {
  const Vec3 phi = log_so3(t.rotation());
  const double th2 = phi.squaredNorm();
  const Mat3 px = skew(phi);
  Mat3 vinv;
  if (th2 < 1e-16) {
    vinv = Mat3::Identity() - 0.5 * px + px * px / 12.0;
  } else {
    const double th = std::sqrt(th2);
    const double cot = 1.0 / th2 - (1.0 + std::cos(th)) / (2.0 * th * std::sin(th));
    vinv = Mat3::Identity() - 0.5 * px + cot * px * px;
  }
  Vec6 xi;
  xi.head<3>() = vinv * t.translation();
  xi.tail<3>() = phi;
  return xi;
}

double angle_between(const Vec3& a, const Vec3& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = a.dot(b) / (na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace ssom
