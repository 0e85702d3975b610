#include "imot/problems/rotation_search.hpp"

#include <Eigen/SVD>

#include "imot/errors.hpp"
#include "imot/problems/weights.hpp"

namespace imot::problems {

double rs_residual(const VectorCorrespondence& m, const Rotation3& rotation) {
  return (m.q - rotation * m.p).norm();
}

Rotation3 wahba_svd(std::span<const VectorCorrespondence> data, std::span<const std::size_t> subset,
                    std::span<const double> weights) {
  const WeightView w(subset, weights);
  if (w.active_count() < 2) throw DegenerateInput("wahba_svd: need at least two vectors");

  Mat3 attitude = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto& m = data[subset[j]];
    attitude += w[j] * m.q * m.p.transpose();
    spread += w[j] * m.p * m.p.transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(spread);
  const auto sigma = svd.singularValues();
  if (!(sigma(0) > 0.0) || sigma(1) <= 1e-10 * sigma(0)) {
    throw DegenerateInput("wahba_svd: vectors are collinear");
  }
  return project_to_so3(attitude);
}

}  // namespace imot::problems
