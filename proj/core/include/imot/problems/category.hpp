#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "imot/geometry.hpp"

namespace imot::problems {

/// Observed object point y ↔ the same keypoint on each of K basis shapes
/// (columns of `basis`).
struct CategoryCorrespondence {
  Vec3 y;
  Eigen::Matrix3Xd basis;
};

struct CategorySolution {
  RigidTransform3 pose;
  Eigen::VectorXd shape;             // c
  std::vector<double> cost_history;  // Σ w Re² after each alternation
};

double cl_residual(const CategoryCorrespondence& m, const RigidTransform3& pose, const Eigen::VectorXd& shape);

struct AlternatingOptions {
  int max_alternations = 30;
  double relative_tolerance = 1e-8;
};

/// Pose and shape by block-coordinate descent: with c fixed, the pose is an
/// Arun fit of Σ c_k b_k(i) onto y_i; with the pose fixed, c solves a linear
/// least-squares system. Starts from c = 1/K. The cost never increases.
///
/// Throws DegenerateInput if fewer than max(3, K) measurements carry weight or
/// the shape system is rank deficient.
CategorySolution solve_category_alternating(std::span<const CategoryCorrespondence> data,
                                            std::span<const std::size_t> subset,
                                            std::span<const double> weights = {},
                                            const AlternatingOptions& options = {});

class CategoryPerception {
 public:
  using Solution = CategorySolution;

  explicit CategoryPerception(std::span<const CategoryCorrespondence> data) : data_(data) {}

  std::size_t measurement_count() const { return data_.size(); }
  double residual(std::size_t i, const CategorySolution& x) const {
    return cl_residual(data_[i], x.pose, x.shape);
  }
  CategorySolution solve(std::span<const std::size_t> subset, std::span<const double> weights) const {
    return solve_category_alternating(data_, subset, weights);
  }
  std::size_t min_measurements() const {
    const std::size_t k = data_.empty() ? 1 : static_cast<std::size_t>(data_.front().basis.cols());
    return std::max<std::size_t>(3, k);
  }
  std::optional<std::vector<std::size_t>> seed_set() const { return std::nullopt; }

 private:
  std::span<const CategoryCorrespondence> data_;
};

}  // namespace imot::problems
