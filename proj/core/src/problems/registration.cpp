#include "imot/problems/registration.hpp"

#include <Eigen/SVD>

#include "imot/errors.hpp"
#include "imot/problems/weights.hpp"

namespace imot::problems {

double reg_residual(const PointCorrespondence& m, const RigidTransform3& transform) {
  return (transform.apply(m.a) - m.b).norm();
}

RigidTransform3 arun_rigid(std::span<const PointCorrespondence> data, std::span<const std::size_t> subset,
                           std::span<const double> weights) {
  const WeightView w(subset, weights);
  if (w.active_count() < 3) throw DegenerateInput("arun_rigid: need at least three points");

  double total = 0.0;
  Vec3 centroid_a = Vec3::Zero();
  Vec3 centroid_b = Vec3::Zero();
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto& m = data[subset[j]];
    total += w[j];
    centroid_a += w[j] * m.a;
    centroid_b += w[j] * m.b;
  }
  centroid_a /= total;
  centroid_b /= total;

  Mat3 cross = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto& m = data[subset[j]];
    const Vec3 da = m.a - centroid_a;
    cross += w[j] * (m.b - centroid_b) * da.transpose();
    spread += w[j] * da * da.transpose();
  }

  const Eigen::JacobiSVD<Mat3> svd(spread);
  const auto sigma = svd.singularValues();
  if (!(sigma(0) > 0.0) || sigma(1) <= 1e-10 * sigma(0)) {
    throw DegenerateInput("arun_rigid: source points are collinear");
  }

  RigidTransform3 out;
  out.rotation = project_to_so3(cross);
  out.translation = centroid_b - out.rotation * centroid_a;
  return out;
}

}  // namespace imot::problems
