#include "imot/estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace imot {

void EstimatorConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("EstimatorConfig: layers must be >= 1");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("EstimatorConfig: convergence_tol must be > 0");
  if (interval_count < 2) throw std::invalid_argument("EstimatorConfig: interval_count must be >= 2");
  if (max_iterations < 1) throw std::invalid_argument("EstimatorConfig: max_iterations must be >= 1");
  if (noise_bound && !(*noise_bound > 0.0)) {
    throw std::invalid_argument("EstimatorConfig: noise bound must be > 0");
  }
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

std::vector<std::size_t> indices_below(std::span<const double> residuals, double bound) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] < bound) out.push_back(i);
  }
  return out;
}

MeasurementPartition::MeasurementPartition(std::size_t n, std::span<const std::size_t> fixed_indices) {
  std::vector<bool> is_fixed(n, false);
  for (std::size_t i : fixed_indices) {
    if (i >= n) throw std::invalid_argument("MeasurementPartition: fixed index out of range");
    is_fixed[i] = true;
  }
  for (std::size_t i = 0; i < n; ++i) (is_fixed[i] ? fixed : free).push_back(i);
}

std::vector<double> MeasurementPartition::free_residuals(std::span<const double> residuals) const {
  std::vector<double> out;
  out.reserve(free.size());
  for (std::size_t i : free) out.push_back(residuals[i]);
  return out;
}

std::vector<std::size_t> MeasurementPartition::with_fixed(std::span<const std::size_t> positions) const {
  std::vector<std::size_t> out = fixed;
  for (std::size_t j : positions) out.push_back(free.at(j));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> MeasurementPartition::below(std::span<const double> residuals, double bound) const {
  std::vector<std::size_t> out = fixed;
  for (std::size_t i : free) {
    if (residuals[i] < bound) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::array<double, 2> graded_thresholds(double terminal_threshold, double noise_bound) {
  std::array<double, 2> out{};
  for (int p = 1; p <= 2; ++p) {
    out[p - 1] = terminal_threshold - 0.5 * p * (terminal_threshold - noise_bound);
  }
  return out;
}

std::optional<std::size_t> deepest_usable_layer(const ThresholdResult& result, std::size_t min_size) {
  for (std::size_t j = result.layers.size(); j-- > 0;) {
    if (result.layers[j].lower_group.size() >= min_size) return j;
  }
  return std::nullopt;
}

}  // namespace imot
