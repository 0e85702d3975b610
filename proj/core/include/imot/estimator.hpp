#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <exception>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imot/errors.hpp"
#include "imot/otsu.hpp"

namespace imot {

/// Contract between a robust estimator and a concrete problem.
///
/// The adapter owns (or views) the measurement list. `solve` is the problem's
/// non-minimal least-squares solver over a subset of measurement indices;
/// `weights` is either empty (uniform) or parallel to `subset`.
template <class A>
concept ProblemAdapter = requires(const A& adapter, std::span<const std::size_t> subset,
                                  std::span<const double> weights,
                                  const typename A::Solution& solution, std::size_t index) {
  typename A::Solution;
  { adapter.measurement_count() } -> std::convertible_to<std::size_t>;
  { adapter.residual(index, solution) } -> std::convertible_to<double>;
  { adapter.solve(subset, weights) } -> std::convertible_to<typename A::Solution>;
  { adapter.min_measurements() } -> std::convertible_to<std::size_t>;
  { adapter.seed_set() } -> std::convertible_to<std::optional<std::vector<std::size_t>>>;
};

/// Adapters that also provide a minimal solver (needed by RANSAC).
template <class A>
concept MinimalProblemAdapter =
    ProblemAdapter<A> && requires(const A& adapter, std::span<const std::size_t> sample) {
      { adapter.minimal_size() } -> std::convertible_to<std::size_t>;
      { adapter.solve_minimal(sample) } -> std::convertible_to<typename A::Solution>;
    };

/// Adapters whose solver always uses some measurements (e.g. trusted
/// odometry). Those are kept in every working set and left out of the
/// residual histogram.
template <class A>
concept HasFixedInliers = requires(const A& adapter) {
  { adapter.fixed_inliers() } -> std::convertible_to<std::vector<std::size_t>>;
};

struct EstimatorConfig {
  int layers = 2;                 // d
  double convergence_tol = 5e-3;  // δ
  int interval_count = kDefaultIntervalCount;
  int max_iterations = 50;
  /// γ. Absent: IMOT* only.
  std::optional<double> noise_bound;
  /// Re-solve on the final inlier set after noise-bound refinement.
  bool final_resolve = true;
  /// Start from adapter.seed_set() when the adapter provides one.
  bool use_seed_set = true;

  void validate() const;
};

template <class Solution>
struct EstimatorResult {
  Solution solution{};
  std::vector<std::size_t> inliers;
  int iterations = 0;
  std::vector<double> threshold_trace;          // T^1 .. T^t
  std::vector<std::size_t> working_set_sizes;   // |C^1| .. |C^t|
  bool converged = false;
  /// Final per-measurement weights (GNC only; empty otherwise).
  std::vector<double> weights;
};

template <ProblemAdapter A>
std::vector<double> compute_residuals(const A& adapter, const typename A::Solution& solution) {
  std::vector<double> out(adapter.measurement_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = adapter.residual(i, solution);
  return out;
}

std::vector<std::size_t> all_indices(std::size_t n);

/// Indices with residual strictly below `bound`.
std::vector<std::size_t> indices_below(std::span<const double> residuals, double bound);

/// Measurement indices split into fixed ones and free ones subject to
/// thresholding. Both lists ascending.
struct MeasurementPartition {
  std::vector<std::size_t> fixed;
  std::vector<std::size_t> free;

  MeasurementPartition(std::size_t n, std::span<const std::size_t> fixed_indices);

  std::vector<double> free_residuals(std::span<const double> residuals) const;
  /// fixed ∪ {free[j] : j ∈ positions}, ascending.
  std::vector<std::size_t> with_fixed(std::span<const std::size_t> positions) const;
  /// fixed ∪ {free i : residuals[i] < bound}, ascending.
  std::vector<std::size_t> below(std::span<const double> residuals, double bound) const;
};

template <ProblemAdapter A>
MeasurementPartition partition_of(const A& adapter) {
  std::vector<std::size_t> fixed;
  if constexpr (HasFixedInliers<A>) fixed = adapter.fixed_inliers();
  return MeasurementPartition(adapter.measurement_count(), fixed);
}

/// Decreasing thresholds T - (p/2)(T - γ) for p = 1, 2 used by the noise-bound
/// refinement when the terminal threshold is far above γ.
std::array<double, 2> graded_thresholds(double terminal_threshold, double noise_bound);

/// Terminal threshold at or above which the graded refinement is used.
inline constexpr double kGradedRefinementFactor = 5.0;

/// Picks the deepest layer whose lower group still has at least `min_size`
/// members. Returns nullopt if not even the first layer does.
std::optional<std::size_t> deepest_usable_layer(const ThresholdResult& result, std::size_t min_size);

namespace detail {

template <ProblemAdapter A>
typename A::Solution solve_at(const A& adapter, std::span<const std::size_t> subset, int iteration) {
  try {
    return adapter.solve(subset, {});
  } catch (const EstimationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverFailure("solver failed at iteration " + std::to_string(iteration) + ": " + e.what(),
                        iteration);
  }
}

}  // namespace detail

/// IMOT*: iterate non-minimal solve on the working set, residuals over all
/// measurements, multi-layered Otsu split, until consecutive terminal
/// thresholds differ by at most δ. A measurement dropped at one iteration may
/// re-enter at the next. Fixed inliers (see HasFixedInliers) stay in every
/// working set and are not thresholded.
template <ProblemAdapter A>
EstimatorResult<typename A::Solution> imot_star(const A& adapter, const EstimatorConfig& config) {
  config.validate();
  const std::size_t n = adapter.measurement_count();
  const std::size_t min_size = adapter.min_measurements();
  if (n < min_size) {
    throw InsufficientInliers("fewer measurements than the solver requires", 0);
  }
  const MeasurementPartition partition = partition_of(adapter);
  const std::size_t min_free = min_size > partition.fixed.size() ? min_size - partition.fixed.size() : 0;

  std::vector<std::size_t> working;
  if (auto seed = adapter.seed_set(); config.use_seed_set && seed) {
    working = std::move(*seed);
  } else {
    working = all_indices(n);
  }

  EstimatorResult<typename A::Solution> result;
  for (int t = 1; t <= config.max_iterations; ++t) {
    result.solution = detail::solve_at(adapter, working, t);
    result.iterations = t;
    if (partition.free.empty()) {
      working = all_indices(n);
      result.threshold_trace.push_back(0.0);
      result.working_set_sizes.push_back(n);
      result.converged = true;
      break;
    }
    const std::vector<double> residuals = compute_residuals(adapter, result.solution);
    const ThresholdResult split =
        multilayer_threshold(partition.free_residuals(residuals), config.interval_count, config.layers);

    double threshold = 0.0;
    if (split.degenerate) {
      // Perfect fit on every measurement.
      working = all_indices(n);
    } else if (split.layers.empty()) {
      threshold = split.threshold;
      working = all_indices(n);
    } else {
      const auto layer = deepest_usable_layer(split, min_free);
      if (!layer) {
        throw InsufficientInliers("lower-residual group smaller than the solver minimum at iteration " +
                                      std::to_string(t),
                                  t);
      }
      threshold = split.layers[*layer].threshold;
      working = partition.with_fixed(split.layers[*layer].lower_group);
    }

    const bool close = !result.threshold_trace.empty() &&
                       std::abs(threshold - result.threshold_trace.back()) <= config.convergence_tol;
    result.threshold_trace.push_back(threshold);
    result.working_set_sizes.push_back(working.size());
    if (split.degenerate || close) {
      result.converged = true;
      break;
    }
  }
  result.inliers = std::move(working);
  return result;
}

/// IMOT: IMOT* followed by noise-bound refinement of the inlier set. A
/// terminal threshold of at least 5γ is lowered to γ over two re-solves;
/// otherwise the inliers are the measurements with residual below γ.
template <ProblemAdapter A>
EstimatorResult<typename A::Solution> imot(const A& adapter, const EstimatorConfig& config) {
  config.validate();
  if (!config.noise_bound) throw std::invalid_argument("imot: noise bound γ is required");
  const double gamma = *config.noise_bound;

  auto result = imot_star(adapter, config);
  const int t = result.iterations;
  const double terminal = result.threshold_trace.back();
  const std::size_t min_size = std::max<std::size_t>(adapter.min_measurements(), 1);
  const MeasurementPartition partition = partition_of(adapter);

  auto require = [&](const std::vector<std::size_t>& set) {
    if (set.size() < min_size) {
      throw InsufficientInliers("noise-bound refinement left too few inliers", t);
    }
  };

  std::vector<double> residuals = compute_residuals(adapter, result.solution);
  std::vector<std::size_t> inliers;
  if (terminal >= kGradedRefinementFactor * gamma) {
    inliers = partition.below(residuals, terminal);
    for (double bound : graded_thresholds(terminal, gamma)) {
      require(inliers);
      result.solution = detail::solve_at(adapter, inliers, t);
      residuals = compute_residuals(adapter, result.solution);
      inliers = partition.below(residuals, bound);
    }
    require(inliers);
    if (config.final_resolve) result.solution = detail::solve_at(adapter, inliers, t);
  } else {
    inliers = partition.below(residuals, gamma);
    require(inliers);
    result.solution = detail::solve_at(adapter, inliers, t);
  }
  result.inliers = std::move(inliers);
  return result;
}

}  // namespace imot
