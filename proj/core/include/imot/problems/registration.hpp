#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "imot/geometry.hpp"

namespace imot::problems {

/// Point correspondence a ↔ b with b ≈ R a + t.
struct PointCorrespondence {
  Vec3 a;
  Vec3 b;
};

double reg_residual(const PointCorrespondence& m, const RigidTransform3& transform);

/// Weighted Arun/Umeyama least-squares rigid fit (no scale).
/// Throws DegenerateInput for fewer than three weighted points or collinear sources.
RigidTransform3 arun_rigid(std::span<const PointCorrespondence> data, std::span<const std::size_t> subset,
                           std::span<const double> weights = {});

class Registration {
 public:
  using Solution = RigidTransform3;

  explicit Registration(std::span<const PointCorrespondence> data) : data_(data) {}

  std::size_t measurement_count() const { return data_.size(); }
  double residual(std::size_t i, const RigidTransform3& x) const { return reg_residual(data_[i], x); }
  RigidTransform3 solve(std::span<const std::size_t> subset, std::span<const double> weights) const {
    return arun_rigid(data_, subset, weights);
  }
  std::size_t min_measurements() const { return 3; }
  std::optional<std::vector<std::size_t>> seed_set() const { return std::nullopt; }

  std::size_t minimal_size() const { return 3; }
  RigidTransform3 solve_minimal(std::span<const std::size_t> sample) const {
    return arun_rigid(data_, sample);
  }

 private:
  std::span<const PointCorrespondence> data_;
};

}  // namespace imot::problems
