#pragma once

#include <Eigen/Core>

namespace imot {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Element of SO(3), stored as a row-major 3x3 matrix.
///
/// Construction through from_matrix() checks orthonormality and det = +1 to
/// within kTolerance. Products and inverses of valid rotations stay valid.
class Rotation3 {
 public:
  using Storage = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;
  static constexpr double kTolerance = 1e-9;

  Rotation3() : m_(Storage::Identity()) {}

  /// Throws std::invalid_argument if `m` is not a rotation within `tol`.
  static Rotation3 from_matrix(const Mat3& m, double tol = kTolerance);
  static Rotation3 identity() { return Rotation3(); }

  const Storage& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation3 operator*(const Rotation3& rhs) const { return Rotation3(m_ * rhs.m_, Unchecked{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation3 inverse() const { return Rotation3(m_.transpose(), Unchecked{}); }

  static bool is_rotation(const Mat3& m, double tol = kTolerance);

 private:
  struct Unchecked {};
  Rotation3(const Storage& m, Unchecked) : m_(m) {}

  Storage m_;
};

/// Planar rigid transform. The heading is kept in (-pi, pi].
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double theta, double x, double y);

  double theta() const { return theta_; }
  double x() const { return x_; }
  double y() const { return y_; }
  Vec2 translation() const { return {x_, y_}; }
  Mat2 rotation() const;

  /// this ⊕ rhs: `rhs` expressed in the frame of this pose.
  Pose2 operator*(const Pose2& rhs) const;
  Pose2 inverse() const;
  /// this⁻¹ ⊕ other.
  Pose2 between(const Pose2& other) const;

  bool operator==(const Pose2&) const = default;

 private:
  double theta_ = 0.0;
  double x_ = 0.0;
  double y_ = 0.0;
};

/// Maps an angle to (-pi, pi].
double normalize_angle(double theta);

Mat2 rotation2(double theta);

struct RigidTransform3 {
  Rotation3 rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// Rodrigues rotation by `angle` about the unit vector `axis`.
/// Throws std::invalid_argument if |axis| deviates from 1 by more than 1e-9.
Rotation3 exp_map_so3(const Vec3& axis, double angle);

/// Rotation angle of AᵀB, in [0, pi].
double geodesic_distance(const Rotation3& a, const Rotation3& b);

/// Frobenius norm of A - B, in [0, 2√2].
double chordal_distance(const Rotation3& a, const Rotation3& b);

/// Closest rotation to `m` in Frobenius norm (SVD with determinant correction).
/// Throws DegenerateInput when the projection is not unique.
Rotation3 project_to_so3(const Mat3& m);

/// Rotation from a (not necessarily normalized) quaternion w + xi + yj + zk.
Rotation3 rotation_from_quaternion(double w, double x, double y, double z);

}  // namespace imot
