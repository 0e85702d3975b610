#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "imot/geometry.hpp"

namespace imot::problems {

/// Geodesic angle between a measured rotation and the estimate.
double ra_residual(const Rotation3& measured, const Rotation3& estimate);

struct WeiszfeldOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-8;
  double distance_guard = 1e-12;
};

/// Weighted L1-chordal median: minimizes Σ w_i ‖R - R_i‖_F over SO(3) by
/// Weiszfeld iterations in the 9-D chordal embedding, projecting back onto
/// SO(3) after each step. Initialized at the projected weighted mean.
///
/// `weights` is empty (uniform) or parallel to `subset`.
Rotation3 l1_chordal_median(std::span<const Rotation3> rotations, std::span<const std::size_t> subset,
                            std::span<const double> weights = {}, const WeiszfeldOptions& options = {});

/// Single rotation averaging.
class RotationAveraging {
 public:
  using Solution = Rotation3;

  explicit RotationAveraging(std::span<const Rotation3> rotations) : rotations_(rotations) {}

  std::size_t measurement_count() const { return rotations_.size(); }
  double residual(std::size_t i, const Rotation3& estimate) const {
    return ra_residual(rotations_[i], estimate);
  }
  Rotation3 solve(std::span<const std::size_t> subset, std::span<const double> weights) const {
    return l1_chordal_median(rotations_, subset, weights);
  }
  std::size_t min_measurements() const { return 1; }
  std::optional<std::vector<std::size_t>> seed_set() const { return std::nullopt; }

  /// A single rotation is already a hypothesis.
  std::size_t minimal_size() const { return 1; }
  Rotation3 solve_minimal(std::span<const std::size_t> sample) const { return rotations_[sample[0]]; }

 private:
  std::span<const Rotation3> rotations_;
};

}  // namespace imot::problems
