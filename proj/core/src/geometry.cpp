#include "imot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "imot/errors.hpp"

namespace imot {

bool Rotation3::is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  const Mat3 gram = m.transpose() * m;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

Rotation3 Rotation3::from_matrix(const Mat3& m, double tol) {
  if (!is_rotation(m, tol)) {
    throw std::invalid_argument("matrix is not a rotation (RᵀR != I or det != 1)");
  }
  return Rotation3(Storage(m), Unchecked{});
}

double normalize_angle(double theta) {
  constexpr double kPi = std::numbers::pi;
  double wrapped = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Mat2 rotation2(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Pose2::Pose2(double theta, double x, double y) : theta_(normalize_angle(theta)), x_(x), y_(y) {}

Mat2 Pose2::rotation() const { return rotation2(theta_); }

Pose2 Pose2::operator*(const Pose2& rhs) const {
  const Vec2 t = translation() + rotation() * rhs.translation();
  return {theta_ + rhs.theta_, t.x(), t.y()};
}

Pose2 Pose2::inverse() const {
  const Vec2 t = -(rotation().transpose() * translation());
  return {-theta_, t.x(), t.y()};
}

Pose2 Pose2::between(const Pose2& other) const { return inverse() * other; }

Rotation3 exp_map_so3(const Vec3& axis, double angle) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("exp_map_so3: axis must have unit norm");
  }
  Mat3 k;
  k << 0.0, -axis.z(), axis.y(),  //
      axis.z(), 0.0, -axis.x(),   //
      -axis.y(), axis.x(), 0.0;
  const Mat3 r = Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * (k * k);
  return Rotation3::from_matrix(r);
}

double geodesic_distance(const Rotation3& a, const Rotation3& b) {
  const double trace = (a.matrix().transpose() * b.matrix()).trace();
  const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

double chordal_distance(const Rotation3& a, const Rotation3& b) {
  return (a.matrix() - b.matrix()).norm();
}

Rotation3 project_to_so3(const Mat3& m) {
  if (!m.allFinite()) throw std::invalid_argument("project_to_so3: non-finite matrix");
  const Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sigma = svd.singularValues();
  const double scale = sigma(0);
  if (!(scale > 0.0) || sigma(1) <= 1e-12 * scale) {
    throw DegenerateInput("project_to_so3: matrix rank < 2, projection is ambiguous");
  }
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  const double det = (u * v.transpose()).determinant();
  Eigen::Vector3d d(1.0, 1.0, det < 0.0 ? -1.0 : 1.0);
  if (det < 0.0 && sigma(1) - sigma(2) <= 1e-12 * scale) {
    throw DegenerateInput("project_to_so3: reflection with repeated singular values");
  }
  const Mat3 r = u * d.asDiagonal() * v.transpose();
  return Rotation3::from_matrix(r);
}

Rotation3 rotation_from_quaternion(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("rotation_from_quaternion: zero or non-finite quaternion");
  }
  q.normalize();
  return Rotation3::from_matrix(q.toRotationMatrix());
}

}  // namespace imot
