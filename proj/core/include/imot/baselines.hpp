#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imot/errors.hpp"
#include "imot/estimator.hpp"

namespace imot::baselines {

struct GncConfig {
  double noise_bound = 0.0;  // ε (= γ)
  double mu_factor = 1.4;
  int max_iterations = 100;

  void validate() const;
};

/// Truncated-least-squares GNC weight for squared residual r2.
double tls_weight(double r2, double eps2, double mu);
/// Geman-McClure GNC weight for squared residual r2.
double gm_weight(double r2, double eps2, double mu);
/// ε² / (2 r_max² − ε²); non-positive when every residual is already inside the band.
double tls_initial_mu(double max_r2, double eps2);
/// 2 r_max² / ε², floored at 1.
double gm_initial_mu(double max_r2, double eps2);

struct AdaptConfig {
  double noise_bound = 0.0;
  double decay = 0.9;
  int max_iterations = 200;

  void validate() const;
};

struct RansacConfig {
  double noise_bound = 0.0;
  int max_iterations = 200;
  double confidence = 0.99;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Hypotheses needed to draw one all-inlier sample with probability
/// `confidence`, given the inlier fraction and the sample size.
std::size_t ransac_required_iterations(double inlier_fraction, std::size_t sample_size, double confidence);

namespace detail {

template <ProblemAdapter A>
typename A::Solution solve_weighted(const A& adapter, std::span<const std::size_t> all,
                                    std::span<const double> weights, int iteration) {
  const auto active =
      static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
  if (active < std::max<std::size_t>(adapter.min_measurements(), 1)) {
    throw InsufficientInliers("weights vanished below the solver minimum at iteration " +
                                  std::to_string(iteration),
                              iteration);
  }
  try {
    return adapter.solve(all, weights);
  } catch (const EstimationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverFailure("solver failed at iteration " + std::to_string(iteration) + ": " + e.what(), iteration);
  }
}

inline double max_squared(std::span<const double> residuals) {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r * r);
  return m;
}

}  // namespace detail

/// GNC with the truncated-least-squares surrogate. μ grows by mu_factor each
/// round; stops once the weights are binary and unchanged.
template <ProblemAdapter A>
EstimatorResult<typename A::Solution> gnc_tls(const A& adapter, const GncConfig& config) {
  config.validate();
  const std::size_t n = adapter.measurement_count();
  const std::vector<std::size_t> all = all_indices(n);
  const double eps2 = config.noise_bound * config.noise_bound;

  EstimatorResult<typename A::Solution> result;
  std::vector<double> weights(n, 1.0);
  result.solution = detail::solve_weighted(adapter, all, weights, 0);
  std::vector<double> residuals = compute_residuals(adapter, result.solution);
  double mu = tls_initial_mu(detail::max_squared(residuals), eps2);

  if (mu <= 0.0) {
    result.converged = true;
  } else {
    std::vector<double> next(n);
    for (int it = 1; it <= config.max_iterations; ++it) {
      result.iterations = it;
      bool binary = true;
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = tls_weight(residuals[i] * residuals[i], eps2, mu);
        binary = binary && (next[i] == 0.0 || next[i] == 1.0);
      }
      const bool stable = binary && next == weights;
      weights = next;
      if (stable) {
        result.converged = true;
        break;
      }
      result.solution = detail::solve_weighted(adapter, all, weights, it);
      residuals = compute_residuals(adapter, result.solution);
      mu *= config.mu_factor;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] > 0.5) result.inliers.push_back(i);
  }
  result.weights = std::move(weights);
  return result;
}

/// GNC with the Geman-McClure surrogate. μ shrinks by mu_factor down to 1;
/// the run ends after the solve at μ = 1. Inliers are residuals within ε.
template <ProblemAdapter A>
EstimatorResult<typename A::Solution> gnc_gm(const A& adapter, const GncConfig& config) {
  config.validate();
  const std::size_t n = adapter.measurement_count();
  const std::vector<std::size_t> all = all_indices(n);
  const double eps2 = config.noise_bound * config.noise_bound;

  EstimatorResult<typename A::Solution> result;
  std::vector<double> weights(n, 1.0);
  result.solution = detail::solve_weighted(adapter, all, weights, 0);
  std::vector<double> residuals = compute_residuals(adapter, result.solution);
  double mu = gm_initial_mu(detail::max_squared(residuals), eps2);

  for (int it = 1; it <= config.max_iterations; ++it) {
    result.iterations = it;
    for (std::size_t i = 0; i < n; ++i) weights[i] = gm_weight(residuals[i] * residuals[i], eps2, mu);
    result.solution = detail::solve_weighted(adapter, all, weights, it);
    residuals = compute_residuals(adapter, result.solution);
    if (mu == 1.0) {
      result.converged = true;
      break;
    }
    mu = std::max(1.0, mu / config.mu_factor);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (residuals[i] <= config.noise_bound) result.inliers.push_back(i);
  }
  result.weights = std::move(weights);
  return result;
}

/// Iterative trimming: fit the working set, then drop members whose residual
/// exceeds max(γ, decay · largest member residual). The working set never grows.
template <ProblemAdapter A>
EstimatorResult<typename A::Solution> adapt_trim(const A& adapter, const AdaptConfig& config) {
  config.validate();
  const std::size_t min_size = adapter.min_measurements();
  if (adapter.measurement_count() < min_size) {
    throw InsufficientInliers("fewer measurements than the solver requires", 0);
  }

  EstimatorResult<typename A::Solution> result;
  std::vector<std::size_t> working = all_indices(adapter.measurement_count());
  for (int it = 1; it <= config.max_iterations; ++it) {
    result.iterations = it;
    result.solution = imot::detail::solve_at(adapter, working, it);
    std::vector<double> residuals(working.size());
    double largest = 0.0;
    for (std::size_t j = 0; j < working.size(); ++j) {
      residuals[j] = adapter.residual(working[j], result.solution);
      largest = std::max(largest, residuals[j]);
    }
    const double bound = std::max(config.noise_bound, config.decay * largest);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < working.size(); ++j) {
      if (residuals[j] <= bound) kept.push_back(working[j]);
    }
    if (kept.size() < min_size) {
      throw InsufficientInliers("trimming left too few measurements at iteration " + std::to_string(it), it);
    }
    const bool stable = kept.size() == working.size();
    working = std::move(kept);
    result.threshold_trace.push_back(bound);
    result.working_set_sizes.push_back(working.size());
    if (stable && bound == config.noise_bound) {
      result.converged = true;
      break;
    }
  }
  result.inliers = std::move(working);
  return result;
}

/// Hypothesize-and-verify with the adapter's minimal solver, consensus
/// {i : residual <= γ}, adaptive stopping, and a least-squares refit on the
/// best consensus.
template <MinimalProblemAdapter A>
EstimatorResult<typename A::Solution> ransac(const A& adapter, const RansacConfig& config) {
  config.validate();
  const std::size_t n = adapter.measurement_count();
  const std::size_t sample_size = adapter.minimal_size();
  if (n < std::max(sample_size, adapter.min_measurements())) {
    throw InsufficientInliers("fewer measurements than the minimal solver requires", 0);
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> sample;
  std::vector<std::size_t> best;
  std::vector<std::size_t> consensus;
  typename A::Solution best_hypothesis{};
  std::size_t budget = static_cast<std::size_t>(config.max_iterations);

  EstimatorResult<typename A::Solution> result;
  for (std::size_t it = 0; it < budget; ++it) {
    result.iterations = static_cast<int>(it + 1);
    sample.clear();
    while (sample.size() < sample_size) {
      const std::size_t candidate = pick(rng);
      if (std::find(sample.begin(), sample.end(), candidate) == sample.end()) sample.push_back(candidate);
    }
    typename A::Solution hypothesis;
    try {
      hypothesis = adapter.solve_minimal(sample);
    } catch (const DegenerateInput&) {
      continue;
    }
    consensus.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (adapter.residual(i, hypothesis) <= config.noise_bound) consensus.push_back(i);
    }
    if (consensus.size() > best.size()) {
      best = consensus;
      best_hypothesis = hypothesis;
      const double fraction = static_cast<double>(best.size()) / static_cast<double>(n);
      budget = std::min<std::size_t>(static_cast<std::size_t>(config.max_iterations),
                                     std::max<std::size_t>(it + 1, ransac_required_iterations(
                                                                       fraction, sample_size, config.confidence)));
    }
  }

  if (best.size() < std::max<std::size_t>(adapter.min_measurements(), sample_size)) {
    throw InsufficientInliers("no hypothesis reached the minimum consensus", result.iterations);
  }

  result.solution = best_hypothesis;
  result.inliers = best;
  try {
    auto refit = adapter.solve(best, {});
    std::vector<std::size_t> refined;
    for (std::size_t i = 0; i < n; ++i) {
      if (adapter.residual(i, refit) <= config.noise_bound) refined.push_back(i);
    }
    if (refined.size() >= adapter.min_measurements()) {
      result.solution = std::move(refit);
      result.inliers = std::move(refined);
    }
  } catch (const DegenerateInput&) {
    // Keep the minimal-sample hypothesis.
  }
  result.converged = true;
  return result;
}

}  // namespace imot::baselines
