#include "imot/problems/rotation_averaging.hpp"

#include <stdexcept>

#include "imot/problems/weights.hpp"

namespace imot::problems {

double ra_residual(const Rotation3& measured, const Rotation3& estimate) {
  return geodesic_distance(measured, estimate);
}

Rotation3 l1_chordal_median(std::span<const Rotation3> rotations, std::span<const std::size_t> subset,
                            std::span<const double> weights, const WeiszfeldOptions& options) {
  const WeightView w(subset, weights);
  if (w.active_count() == 0) throw std::invalid_argument("l1_chordal_median: empty subset");

  Mat3 mean = Mat3::Zero();
  for (std::size_t j = 0; j < subset.size(); ++j) mean += w[j] * rotations[subset[j]].matrix();
  Rotation3 estimate = project_to_so3(mean);

  for (int it = 0; it < options.max_iterations; ++it) {
    Mat3 numerator = Mat3::Zero();
    double denominator = 0.0;
    for (std::size_t j = 0; j < subset.size(); ++j) {
      if (w[j] == 0.0) continue;
      const Rotation3& r = rotations[subset[j]];
      const double coeff = w[j] / (chordal_distance(estimate, r) + options.distance_guard);
      numerator += coeff * r.matrix();
      denominator += coeff;
    }
    const Rotation3 next = project_to_so3(numerator / denominator);
    const double step = chordal_distance(next, estimate);
    estimate = next;
    if (step < options.step_tolerance) break;
  }
  return estimate;
}

}  // namespace imot::problems
