#include "imot/problems/category.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "imot/errors.hpp"
#include "imot/problems/registration.hpp"
#include "imot/problems/weights.hpp"

namespace imot::problems {

double cl_residual(const CategoryCorrespondence& m, const RigidTransform3& pose, const Eigen::VectorXd& shape) {
  return (pose.apply(m.basis * shape) - m.y).norm();
}

namespace {

double weighted_cost(std::span<const CategoryCorrespondence> data, std::span<const std::size_t> subset,
                     const WeightView& w, const RigidTransform3& pose, const Eigen::VectorXd& shape) {
  double cost = 0.0;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const double r = cl_residual(data[subset[j]], pose, shape);
    cost += w[j] * r * r;
  }
  return cost;
}

}  // namespace

CategorySolution solve_category_alternating(std::span<const CategoryCorrespondence> data,
                                            std::span<const std::size_t> subset,
                                            std::span<const double> weights,
                                            const AlternatingOptions& options) {
  const WeightView w(subset, weights);
  if (subset.empty()) throw std::invalid_argument("solve_category_alternating: empty subset");
  const Eigen::Index k = data[subset.front()].basis.cols();
  if (k < 1) throw std::invalid_argument("solve_category_alternating: no basis shapes");
  for (std::size_t i : subset) {
    if (data[i].basis.cols() != k) {
      throw std::invalid_argument("solve_category_alternating: inconsistent basis size");
    }
  }
  if (w.active_count() < std::max<std::size_t>(3, static_cast<std::size_t>(k))) {
    throw DegenerateInput("solve_category_alternating: too few measurements for the shape system");
  }

  CategorySolution out;
  out.shape = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));

  std::vector<PointCorrespondence> instantiated(subset.size());
  std::vector<std::size_t> local(subset.size());
  for (std::size_t j = 0; j < subset.size(); ++j) local[j] = j;

  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_alternations; ++it) {
    for (std::size_t j = 0; j < subset.size(); ++j) {
      const auto& m = data[subset[j]];
      instantiated[j] = {m.basis * out.shape, m.y};
    }
    out.pose = arun_rigid(instantiated, local, weights);

    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    const Mat3 rt = out.pose.rotation.matrix().transpose();
    for (std::size_t j = 0; j < subset.size(); ++j) {
      if (w[j] == 0.0) continue;
      const auto& m = data[subset[j]];
      normal.noalias() += w[j] * m.basis.transpose() * m.basis;
      rhs.noalias() += w[j] * m.basis.transpose() * (rt * (m.y - out.pose.translation));
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const auto& lambda = eig.eigenvalues();
    if (eig.info() != Eigen::Success || !(lambda(k - 1) > 0.0) || lambda(0) <= 1e-12 * lambda(k - 1)) {
      throw DegenerateInput("solve_category_alternating: shape system is rank deficient");
    }
    const Eigen::MatrixXd& v = eig.eigenvectors();
    out.shape = v * ((v.transpose() * rhs).array() / lambda.array()).matrix();

    const double cost = weighted_cost(data, subset, w, out.pose, out.shape);
    out.cost_history.push_back(cost);
    if (cost == 0.0) break;
    if (std::isfinite(previous) && previous - cost <= options.relative_tolerance * previous) break;
    previous = cost;
  }
  return out;
}

}  // namespace imot::problems
