#include "imot/bench/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iterator>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>

#include "imot/baselines.hpp"
#include "imot/bench/g2o.hpp"
#include "imot/errors.hpp"
#include "imot/estimator.hpp"
#include "imot/problems/category.hpp"
#include "imot/problems/pose_graph.hpp"
#include "imot/problems/registration.hpp"
#include "imot/problems/rotation_averaging.hpp"
#include "imot/problems/rotation_search.hpp"
#include "imot/synth.hpp"

namespace imot::bench {

namespace {

constexpr std::pair<ProblemKind, std::string_view> kProblemNames[] = {
    {ProblemKind::RotationAveraging, "rot-avg"},
    {ProblemKind::RotationSearch, "rot-search"},
    {ProblemKind::Registration, "registration"},
    {ProblemKind::Category, "category"},
    {ProblemKind::Slam, "slam"},
};

constexpr std::pair<EstimatorKind, std::string_view> kEstimatorNames[] = {
    {EstimatorKind::Imot, "imot"},     {EstimatorKind::ImotStar, "imot-star"}, {EstimatorKind::GncTls, "gnc-tls"},
    {EstimatorKind::GncGm, "gnc-gm"},  {EstimatorKind::Adapt, "adapt"},        {EstimatorKind::Ransac, "ransac"},
};

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct EstimatorParams {
  int layers = 2;
  double delta = 5e-3;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

template <ProblemAdapter A>
EstimatorResult<typename A::Solution> run_estimator(EstimatorKind kind, const A& adapter, const EstimatorParams& p) {
  switch (kind) {
    case EstimatorKind::Imot:
    case EstimatorKind::ImotStar: {
      EstimatorConfig config;
      config.layers = p.layers;
      config.convergence_tol = p.delta;
      if (kind == EstimatorKind::Imot) config.noise_bound = p.gamma;
      return kind == EstimatorKind::Imot ? imot(adapter, config) : imot_star(adapter, config);
    }
    case EstimatorKind::GncTls:
      return baselines::gnc_tls(adapter, baselines::GncConfig{.noise_bound = p.gamma});
    case EstimatorKind::GncGm:
      return baselines::gnc_gm(adapter, baselines::GncConfig{.noise_bound = p.gamma});
    case EstimatorKind::Adapt:
      return baselines::adapt_trim(adapter, baselines::AdaptConfig{.noise_bound = p.gamma});
    case EstimatorKind::Ransac:
      if constexpr (MinimalProblemAdapter<A>) {
        return baselines::ransac(adapter, baselines::RansacConfig{.noise_bound = p.gamma, .seed = p.seed});
      } else {
        throw std::invalid_argument("ransac needs a minimal solver");
      }
  }
  throw std::invalid_argument("unknown estimator");
}

/// Per-estimator hook that fills the problem-specific error columns.
template <class Solution>
using Scorer = std::function<void(const EstimatorResult<Solution>&, BenchRow&)>;

template <ProblemAdapter A>
void run_all(const SweepConfig& config, const A& adapter, const EstimatorParams& params, const BenchRow& base,
             const Scorer<typename A::Solution>& score, std::vector<BenchRow>& out) {
  for (EstimatorKind kind : config.estimators) {
    BenchRow row = base;
    row.estimator = std::string(to_string(kind));
    try {
      const auto start = std::chrono::steady_clock::now();
      const auto result = run_estimator(kind, adapter, params);
      row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.iterations = result.iterations;
      row.converged = result.converged;
      score(result, row);
    } catch (const EstimationError& e) {
      row.status = TrialStatus::Failed;
      row.message = e.what();
      row.iterations = e.iteration();
    } catch (const DegenerateInput& e) {
      row.status = TrialStatus::Failed;
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = TrialStatus::Crashed;
      row.message = e.what();
    }
    out.push_back(std::move(row));
  }
}

void set_inlier_scores(BenchRow& row, std::span<const std::size_t> selected, const std::vector<bool>& mask,
                       std::span<const std::size_t> scope = {}) {
  const InlierScore s = score_inliers(selected, mask, scope);
  row.inlier_precision = s.precision;
  row.inlier_recall = s.recall;
}

synth::GeneratorSpec generator_spec(const SweepConfig& config, double ratio, std::uint64_t seed, double sigma) {
  synth::GeneratorSpec spec;
  spec.n = config.n;
  spec.noise_sigma = sigma;
  spec.outlier_ratio = ratio;
  spec.shape_count = config.shape_count;
  spec.seed = seed;
  return spec;
}

/// Shared inputs loaded once per sweep.
struct SweepContext {
  std::vector<Vec3> source_points;
  std::optional<problems::PoseGraph> dataset;
  std::vector<Pose2> dataset_reference;
};

std::vector<BenchRow> run_trial(const SweepConfig& config, const SweepContext& context, double ratio, int trial) {
  const std::uint64_t seed = trial_seed(config.seed, ratio, trial);
  BenchRow base;
  base.problem = std::string(to_string(config.problem));
  base.n = config.n;
  base.outlier_ratio = ratio;
  base.trial = trial;
  base.seed = seed;

  EstimatorParams params;
  params.layers = config.layer_count();
  params.delta = config.delta;
  params.gamma = config.noise_bound();
  params.seed = splitmix64(seed);

  std::vector<BenchRow> rows;
  switch (config.problem) {
    case ProblemKind::RotationAveraging: {
      const auto inst = synth::gen_rotation_averaging(generator_spec(config, ratio, seed, config.sigma / kRadToDeg));
      const problems::RotationAveraging adapter(inst.measurements);
      run_all<problems::RotationAveraging>(
          config, adapter, params, base,
          [&](const EstimatorResult<Rotation3>& r, BenchRow& row) {
            row.rotation_error_deg = geodesic_distance(r.solution, inst.ground_truth) * kRadToDeg;
            set_inlier_scores(row, r.inliers, inst.inlier_mask);
          },
          rows);
      break;
    }
    case ProblemKind::RotationSearch: {
      const auto inst = synth::gen_rotation_search(generator_spec(config, ratio, seed, config.sigma));
      const problems::RotationSearch adapter(inst.measurements);
      run_all<problems::RotationSearch>(
          config, adapter, params, base,
          [&](const EstimatorResult<Rotation3>& r, BenchRow& row) {
            row.rotation_error_deg = geodesic_distance(r.solution, inst.ground_truth) * kRadToDeg;
            set_inlier_scores(row, r.inliers, inst.inlier_mask);
          },
          rows);
      break;
    }
    case ProblemKind::Registration: {
      const auto inst =
          synth::gen_registration(generator_spec(config, ratio, seed, config.sigma), context.source_points);
      const problems::Registration adapter(inst.measurements);
      run_all<problems::Registration>(
          config, adapter, params, base,
          [&](const EstimatorResult<RigidTransform3>& r, BenchRow& row) {
            row.rotation_error_deg = geodesic_distance(r.solution.rotation, inst.ground_truth.rotation) * kRadToDeg;
            row.translation_error = (r.solution.translation - inst.ground_truth.translation).norm();
            set_inlier_scores(row, r.inliers, inst.inlier_mask);
          },
          rows);
      break;
    }
    case ProblemKind::Category: {
      const auto inst = synth::gen_category(generator_spec(config, ratio, seed, config.sigma));
      const problems::CategoryPerception adapter(inst.measurements);
      run_all<problems::CategoryPerception>(
          config, adapter, params, base,
          [&](const EstimatorResult<problems::CategorySolution>& r, BenchRow& row) {
            const auto& truth = inst.ground_truth;
            row.rotation_error_deg = geodesic_distance(r.solution.pose.rotation, truth.pose.rotation) * kRadToDeg;
            row.translation_error = (r.solution.pose.translation - truth.pose.translation).norm();
            row.shape_error = (r.solution.shape - truth.shape).norm() / truth.shape.norm();
            set_inlier_scores(row, r.inliers, inst.inlier_mask);
          },
          rows);
      break;
    }
    case ProblemKind::Slam: {
      problems::PoseGraph clean;
      std::vector<Pose2> reference;
      if (context.dataset) {
        clean = *context.dataset;
        reference = context.dataset_reference;
      } else {
        synth::GridGraphSpec grid;
        grid.rows = static_cast<int>(config.n / static_cast<std::size_t>(grid.columns));
        grid.loop_closures = config.loop_closures;
        grid.translation_sigma = config.sigma;
        grid.seed = seed;
        auto inst = synth::gen_grid_pose_graph(grid);
        clean = std::move(inst.graph);
        reference = std::move(inst.ground_truth);
      }
      const auto corrupted = synth::corrupt_loop_closures(clean, ratio, splitmix64(seed ^ 0x5bd1e995ULL));
      const auto loops = corrupted.graph.loop_closure_edges();
      const problems::PoseGraphProblem adapter(corrupted.graph);
      run_all<problems::PoseGraphProblem>(
          config, adapter, params, base,
          [&](const EstimatorResult<std::vector<Pose2>>& r, BenchRow& row) {
            row.trajectory_ate = absolute_trajectory_error(r.solution, reference);
            set_inlier_scores(row, r.inliers, corrupted.inlier_mask, loops);
          },
          rows);
      break;
    }
  }
  return rows;
}

SweepContext load_context(const SweepConfig& config) {
  SweepContext context;
  if (config.problem == ProblemKind::Registration && config.point_file) {
    context.source_points = synth::load_point_file(*config.point_file);
  }
  if (config.problem == ProblemKind::Slam && config.g2o_file) {
    context.dataset = parse_g2o_2d(*config.g2o_file);
    const auto all = all_indices(context.dataset->edges.size());
    context.dataset_reference = problems::solve_pose_graph(*context.dataset, all);
  }
  return context;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  for (const auto& [k, name] : kProblemNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view to_string(EstimatorKind kind) {
  for (const auto& [k, name] : kEstimatorNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem(std::string_view name) {
  for (const auto& [k, n] : kProblemNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  for (const auto& [k, n] : kEstimatorNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool supports(ProblemKind problem, EstimatorKind estimator) {
  return estimator != EstimatorKind::Ransac ||
         (problem != ProblemKind::Category && problem != ProblemKind::Slam);
}

SweepConfig SweepConfig::defaults_for(ProblemKind problem) {
  SweepConfig c;
  c.problem = problem;
  c.ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  switch (problem) {
    case ProblemKind::RotationAveraging:
      c.n = 100;
      c.sigma = 5.0;
      c.gamma_mult = 3.0;
      c.ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
      break;
    case ProblemKind::RotationSearch:
      c.n = 500;
      c.sigma = 0.01;
      c.gamma_mult = 6.0;
      break;
    case ProblemKind::Registration:
      c.n = 100;
      c.sigma = 0.01;
      c.gamma_mult = 5.0;
      break;
    case ProblemKind::Category:
      c.n = 100;
      c.sigma = 0.01;
      c.gamma_mult = 5.0;
      break;
    case ProblemKind::Slam:
      c.n = 200;
      c.sigma = 0.05;
      c.gamma_mult = 3.5;
      break;
  }
  for (const auto& [kind, name] : kEstimatorNames) {
    if (supports(problem, kind)) c.estimators.push_back(kind);
  }
  return c;
}

void SweepConfig::validate() const {
  if (ratios.empty()) throw std::invalid_argument("no outlier ratios given");
  for (double r : ratios) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("outlier ratio must lie in [0, 1)");
  }
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (estimators.empty()) throw std::invalid_argument("no estimators given");
  for (EstimatorKind e : estimators) {
    if (!supports(problem, e)) {
      throw std::invalid_argument(std::string(to_string(e)) + " does not support " + std::string(to_string(problem)));
    }
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(gamma_mult > 0.0)) throw std::invalid_argument("gamma multiple must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  if (layers && *layers < 1) throw std::invalid_argument("layer count must be positive");
  if (threads < 1) throw std::invalid_argument("thread count must be positive");
  if (shape_count < 1) throw std::invalid_argument("shape count must be positive");
  if (problem == ProblemKind::Slam && !g2o_file && (n < 40 || n % 20 != 0)) {
    throw std::invalid_argument("slam vertex count must be a multiple of 20, at least 40");
  }
  if (problem != ProblemKind::Slam && n < 3) throw std::invalid_argument("n must be at least 3");
}

double SweepConfig::noise_bound() const {
  if (problem == ProblemKind::Slam) return gamma_mult;
  if (problem == ProblemKind::RotationAveraging) return gamma_mult * sigma / kRadToDeg;
  return gamma_mult * sigma;
}

int SweepConfig::layer_count() const {
  if (layers) return *layers;
  return problem == ProblemKind::Slam ? kSlamLayerCount : recommended_layer_count(n);
}

std::uint64_t trial_seed(std::uint64_t base, double ratio, int trial) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(ratio));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

std::vector<BenchRow> run_monte_carlo(const SweepConfig& config) {
  config.validate();
  const SweepContext context = load_context(config);

  struct Task {
    double ratio;
    int trial;
  };
  std::vector<Task> tasks;
  for (double ratio : config.ratios) {
    for (int t = 0; t < config.trials; ++t) tasks.push_back({ratio, t});
  }

  std::vector<std::vector<BenchRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size() && !failed; i = next++) {
      try {
        results[i] = run_trial(config, context, tasks[i].ratio, tasks[i].trial);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const std::size_t thread_count = std::min(config.threads, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < thread_count; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<BenchRow> rows;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(rows));

  auto estimator_rank = [&](const std::string& name) {
    for (std::size_t i = 0; i < config.estimators.size(); ++i) {
      if (to_string(config.estimators[i]) == name) return i;
    }
    return config.estimators.size();
  };
  auto ratio_rank = [&](double ratio) {
    return static_cast<std::size_t>(std::find(config.ratios.begin(), config.ratios.end(), ratio) - config.ratios.begin());
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const BenchRow& a, const BenchRow& b) {
    const auto ka = std::tuple(estimator_rank(a.estimator), ratio_rank(a.outlier_ratio), a.trial);
    const auto kb = std::tuple(estimator_rank(b.estimator), ratio_rank(b.outlier_ratio), b.trial);
    return ka < kb;
  });
  return rows;
}

double absolute_trajectory_error(std::span<const Pose2> estimate, std::span<const Pose2> reference) {
  if (estimate.size() != reference.size() || estimate.empty()) {
    throw std::invalid_argument("absolute_trajectory_error: trajectories differ in length");
  }
  const double count = static_cast<double>(estimate.size());
  Vec2 mean_e = Vec2::Zero();
  Vec2 mean_r = Vec2::Zero();
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    mean_e += estimate[i].translation();
    mean_r += reference[i].translation();
  }
  mean_e /= count;
  mean_r /= count;

  double dot = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const Vec2 e = estimate[i].translation() - mean_e;
    const Vec2 r = reference[i].translation() - mean_r;
    dot += e.dot(r);
    cross += e.x() * r.y() - e.y() * r.x();
  }
  const Mat2 rot = rotation2(std::atan2(cross, dot));

  double sum = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const Vec2 aligned = rot * (estimate[i].translation() - mean_e) + mean_r;
    sum += (aligned - reference[i].translation()).squaredNorm();
  }
  return std::sqrt(sum / count);
}

InlierScore score_inliers(std::span<const std::size_t> selected, const std::vector<bool>& inlier_mask,
                          std::span<const std::size_t> scope) {
  std::vector<bool> in_scope(inlier_mask.size(), scope.empty());
  for (std::size_t i : scope) in_scope.at(i) = true;

  std::size_t chosen = 0;
  std::size_t hits = 0;
  for (std::size_t i : selected) {
    if (!in_scope.at(i)) continue;
    ++chosen;
    if (inlier_mask[i]) ++hits;
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < inlier_mask.size(); ++i) {
    if (in_scope[i] && inlier_mask[i]) ++positives;
  }
  InlierScore s;
  if (chosen > 0) s.precision = static_cast<double>(hits) / static_cast<double>(chosen);
  if (positives > 0) s.recall = static_cast<double>(hits) / static_cast<double>(positives);
  return s;
}

}  // namespace imot::bench
