#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "imot/bench/csv.hpp"
#include "imot/geometry.hpp"

namespace imot::bench {

enum class ProblemKind { RotationAveraging, RotationSearch, Registration, Category, Slam };
enum class EstimatorKind { Imot, ImotStar, GncTls, GncGm, Adapt, Ransac };

std::string_view to_string(ProblemKind kind);
std::string_view to_string(EstimatorKind kind);
std::optional<ProblemKind> parse_problem(std::string_view name);
std::optional<EstimatorKind> parse_estimator(std::string_view name);

/// RANSAC needs a minimal solver, which category and slam lack.
bool supports(ProblemKind problem, EstimatorKind estimator);

struct SweepConfig {
  ProblemKind problem = ProblemKind::Registration;
  /// Measurements per instance; vertex count (a multiple of 20) for slam.
  std::size_t n = 100;
  /// Inlier noise: degrees for rot-avg, translation σ (m) for slam, otherwise
  /// the per-axis σ of the measurement.
  double sigma = 0.01;
  std::vector<double> ratios;
  int trials = 30;
  std::uint64_t seed = 0;
  std::vector<EstimatorKind> estimators;
  /// Otsu layers d; absent picks the problem default.
  std::optional<int> layers;
  double delta = 5e-3;
  /// γ = gamma_mult·σ. For slam residuals are whitened and γ = gamma_mult.
  double gamma_mult = 5.0;
  int shape_count = 10;
  std::size_t loop_closures = 50;
  std::size_t threads = 1;
  std::optional<std::filesystem::path> point_file;
  std::optional<std::filesystem::path> g2o_file;

  /// Problem-specific defaults (n, σ, γ multiple, ratios, all supported estimators).
  static SweepConfig defaults_for(ProblemKind problem);
  void validate() const;
  double noise_bound() const;
  int layer_count() const;
};

/// Per-trial seed, a function of the base seed, the ratio value and the trial index.
std::uint64_t trial_seed(std::uint64_t base, double ratio, int trial);

/// One row per (estimator, ratio, trial), sorted in that order. Every
/// estimator in a trial sees the same instance.
std::vector<BenchRow> run_monte_carlo(const SweepConfig& config);

/// RMS position error after the least-squares planar rigid alignment of
/// `estimate` onto `reference`.
double absolute_trajectory_error(std::span<const Pose2> estimate, std::span<const Pose2> reference);

struct InlierScore {
  std::optional<double> precision;
  std::optional<double> recall;
};

/// Scores `selected` against ground-truth labels, restricted to `scope` when
/// it is non-empty. Precision is absent for an empty selection, recall when
/// there are no true inliers.
InlierScore score_inliers(std::span<const std::size_t> selected, const std::vector<bool>& inlier_mask,
                          std::span<const std::size_t> scope = {});

}  // namespace imot::bench
