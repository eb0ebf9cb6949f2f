#include <random>

#include "doctest.h"
#include "ssom/geometry.hpp"

using namespace ssom;

namespace {

Vec3 rand_vec(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("pose composition and inverse") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Pose a(exp_so3(rand_vec(rng, 2.0)), rand_vec(rng, 5.0));
    const Pose b(exp_so3(rand_vec(rng, 2.0)), rand_vec(rng, 5.0));
    const Vec3 p = rand_vec(rng, 10.0);
    CHECK(((a * b) * p - a * (b * p)).norm() < 1e-12);
    const Pose id = a * a.inverse();
    CHECK(id.rotation_angle() < 1e-12);
    CHECK(id.translation().norm() < 1e-12);
  }
}

TEST_CASE("matrix round trip and validation") {
  const Pose a(exp_so3(Vec3(0.3, -0.2, 0.9)), Vec3(1.0, 2.0, 3.0));
  const Pose b = Pose::from_matrix(a.matrix());
  CHECK((a.rotation() - b.rotation()).norm() < 1e-14);
  CHECK((a.translation() - b.translation()).norm() < 1e-14);

  Mat4 bad = a.matrix();
  bad(3, 3) = 2.0;
  CHECK_THROWS_AS(Pose::from_matrix(bad), std::invalid_argument);

  Mat4 squished = a.matrix();
  squished.block<3, 1>(0, 0) *= 3.0;
  CHECK_THROWS_AS(Pose::from_matrix(squished), std::invalid_argument);
}

TEST_CASE("skew matrix reproduces the cross product") {
  const Vec3 a(0.5, -1.0, 2.0), b(3.0, 0.25, -0.75);
  CHECK((skew(a) * b - a.cross(b)).norm() < 1e-15);
  CHECK((skew(a) + skew(a).transpose()).norm() == 0.0);
}

TEST_CASE("so3 exp against hand-computed 90 degree yaw") {
  const Mat3 r = exp_so3(Vec3(0.0, 0.0, M_PI / 2.0));
  CHECK((r * Vec3(1.0, 0.0, 0.0) - Vec3(0.0, 1.0, 0.0)).norm() < 1e-12);
  CHECK((r * Vec3(0.0, 1.0, 0.0) - Vec3(-1.0, 0.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("so3 log inverts exp including tiny angles") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    Vec3 w = rand_vec(rng, 1.0).normalized();
    const double mag = (i % 4 == 0) ? 1e-9 : 0.03 * static_cast<double>(i);
    w *= mag;
    if (w.norm() > 3.1) continue;  // keep away from the pi ambiguity
    CHECK((log_so3(exp_so3(w)) - w).norm() < 1e-9 * std::max(1.0, mag));
  }
  CHECK(log_so3(Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("se3 exp and log are mutually inverse") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Vec6 xi;
    xi.head<3>() = rand_vec(rng, 4.0);
    xi.tail<3>() = rand_vec(rng, 1.2);
    const Vec6 back = log_se3(exp_se3(xi));
    CHECK((back - xi).norm() < 1e-9);
  }
  const Pose id = exp_se3(Vec6::Zero());
  CHECK(id.rotation_angle() == 0.0);
  CHECK(id.translation().norm() == 0.0);
}

TEST_CASE("se3 exp of a pure translation is a shift") {
  Vec6 xi = Vec6::Zero();
  xi.head<3>() = Vec3(1.0, -2.0, 0.5);
  const Pose t = exp_se3(xi);
  CHECK(t.rotation_angle() == 0.0);
  CHECK((t.translation() - Vec3(1.0, -2.0, 0.5)).norm() < 1e-15);
}

TEST_CASE("rotation angle and orthonormalization") {
  const Pose p(exp_so3(Vec3(0.0, 0.0, 0.4)), Vec3::Zero());
  CHECK(p.rotation_angle() == doctest::Approx(0.4).epsilon(1e-12));

  Pose noisy = p;
  noisy.rotation()(0, 0) += 1e-4;
  CHECK(noisy.orthonormality_error() > 1e-5);
  noisy.orthonormalize();
  CHECK(noisy.orthonormality_error() < 1e-12);
}

TEST_CASE("angle between vectors") {
  CHECK(angle_between(Vec3(1, 0, 0), Vec3(0, 2, 0)) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(angle_between(Vec3(1, 1, 0), Vec3(5, 5, 0)) < 1e-7);
  CHECK(angle_between(Vec3(1, 0, 0), Vec3(-3, 0, 0)) == doctest::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("degree conversions") {
  CHECK(deg2rad(180.0) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(rad2deg(M_PI / 4.0) == doctest::Approx(45.0).epsilon(1e-15));
}
