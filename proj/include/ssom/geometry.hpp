// Rigid-body transforms and SE(3)/SO(3) exponential maps used across the pipeline.
#pragma once

#include <Eigen/Dense>

namespace ssom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Rigid transform (rotation + translation). Kept as a concrete pair instead of
// Eigen::Isometry3d so orthonormality checks and file round-trips stay explicit.
class Pose {
 public:
  Pose() : r_(Mat3::Identity()), t_(Vec3::Zero()) {}
  Pose(const Mat3& r, const Vec3& t) : r_(r), t_(t) {}

  static Pose identity() { return Pose(); }

  // Builds from a 4x4 homogeneous matrix. Throws std::invalid_argument if the
  // bottom row is not [0 0 0 1] or the rotation block is grossly non-orthonormal.
  static Pose from_matrix(const Mat4& m);

  const Mat3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }
  Mat3& rotation() { return r_; }
  Vec3& translation() { return t_; }

  Mat4 matrix() const;
  Pose inverse() const { return Pose(r_.transpose(), -(r_.transpose() * t_)); }
  Pose operator*(const Pose& o) const { return Pose(r_ * o.r_, r_ * o.t_ + t_); }
  Vec3 operator*(const Vec3& p) const { return r_ * p + t_; }

  // Max deviation of R^T R from identity; 0 for a perfect rotation.
  double orthonormality_error() const;
  // Projects the rotation block back onto SO(3) via SVD.
  void orthonormalize();
  // Absolute rotation angle in radians.
  double rotation_angle() const;

 private:
  Mat3 r_;
  Vec3 t_;
};

Mat3 skew(const Vec3& v);

Mat3 exp_so3(const Vec3& w);
Vec3 log_so3(const Mat3& r);

// Twist convention: xi = [translation; rotation].
Pose exp_se3(const Vec6& xi);
Vec6 log_se3(const Pose& t);

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

// Angle between two (not necessarily unit) vectors, in radians, in [0, pi].
double angle_between(const Vec3& a, const Vec3& b);

}  // namespace ssom
