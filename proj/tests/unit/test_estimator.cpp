#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "imot/estimator.hpp"
#include "imot/problems/registration.hpp"
#include "imot/problems/rotation_search.hpp"
#include "imot/synth.hpp"

using namespace imot;

namespace {

/// Scalar location problem: the solution is the mean of the subset.
struct Location {
  using Solution = double;

  std::vector<double> data;
  std::size_t minimum = 1;
  std::optional<std::vector<std::size_t>> seed;
  mutable int solves = 0;
  bool fail = false;

  std::size_t measurement_count() const { return data.size(); }
  double residual(std::size_t i, double x) const { return std::abs(data[i] - x); }
  double solve(std::span<const std::size_t> subset, std::span<const double> weights) const {
    ++solves;
    if (fail) throw std::runtime_error("boom");
    double sum = 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < subset.size(); ++j) {
      const double w = weights.empty() ? 1.0 : weights[j];
      sum += w * data[subset[j]];
      total += w;
    }
    return sum / total;
  }
  std::size_t min_measurements() const { return minimum; }
  std::optional<std::vector<std::size_t>> seed_set() const { return seed; }
};

struct PinnedLocation : Location {
  std::vector<std::size_t> pinned;
  std::vector<std::size_t> fixed_inliers() const { return pinned; }
};

static_assert(ProblemAdapter<Location>);
static_assert(!MinimalProblemAdapter<Location>);
static_assert(HasFixedInliers<PinnedLocation>);
static_assert(MinimalProblemAdapter<problems::Registration>);

Location clustered(std::size_t inliers, std::size_t outliers, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::uniform_real_distribution<double> far(20.0, 100.0);
  Location loc;
  for (std::size_t i = 0; i < inliers; ++i) loc.data.push_back(5.0 + noise(rng));
  for (std::size_t i = 0; i < outliers; ++i) loc.data.push_back(i % 2 == 0 ? 5.0 + far(rng) : 5.0 - far(rng));
  return loc;
}

}  // namespace

TEST_CASE("graded thresholds") {
  const double gamma = 0.3;
  const auto t = graded_thresholds(10 * gamma, gamma);
  CHECK(t[0] == doctest::Approx(5.5 * gamma));
  CHECK(t[1] == doctest::Approx(gamma));
  CHECK(kGradedRefinementFactor == 5.0);
}

TEST_CASE("config validation") {
  EstimatorConfig c;
  CHECK_NOTHROW(c.validate());
  c.layers = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.convergence_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.interval_count = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.noise_bound = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  Location loc = clustered(10, 0, 1);
  CHECK_THROWS_AS(imot::imot(loc, EstimatorConfig{}), std::invalid_argument);
}

TEST_CASE("imot_star separates a contaminated location problem") {
  Location loc = clustered(60, 40, 2);
  EstimatorConfig config;
  const auto r = imot_star(loc, config);
  CHECK(r.converged);
  CHECK(std::abs(r.solution - 5.0) < 0.1);
  for (std::size_t i : r.inliers) CHECK(i < 60);
  CHECK(r.threshold_trace.size() == static_cast<std::size_t>(r.iterations));
  CHECK(r.working_set_sizes.size() == static_cast<std::size_t>(r.iterations));
  CHECK(r.iterations >= 2);
  const double last = r.threshold_trace.back();
  const double before = r.threshold_trace[r.threshold_trace.size() - 2];
  CHECK(std::abs(last - before) <= config.convergence_tol);
}

TEST_CASE("outlier-free input stays close to the least-squares fit") {
  Location loc = clustered(100, 0, 3);
  const auto r = imot_star(loc, EstimatorConfig{});
  CHECK(r.converged);
  const double mean = std::accumulate(loc.data.begin(), loc.data.end(), 0.0) / 100.0;
  CHECK(std::abs(r.solution - mean) < 0.1);
}

TEST_CASE("seed set drives the first solve and others can enter later") {
  Location loc = clustered(50, 0, 4);
  loc.seed = std::vector<std::size_t>{0, 1, 2};
  EstimatorConfig config;
  config.layers = 1;
  const auto r = imot_star(loc, config);
  CHECK(r.inliers.size() > 3);

  loc.solves = 0;
  config.use_seed_set = false;
  config.max_iterations = 1;
  const auto all = imot_star(loc, config);
  const double mean = std::accumulate(loc.data.begin(), loc.data.end(), 0.0) / 50.0;
  CHECK(all.solution == doctest::Approx(mean));
}

TEST_CASE("hitting max_iterations is reported, not thrown") {
  Location loc = clustered(30, 20, 5);
  EstimatorConfig config;
  config.max_iterations = 1;
  const auto r = imot_star(loc, config);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
}

TEST_CASE("layer back-off and insufficient inliers") {
  Location loc = clustered(60, 40, 6);
  EstimatorConfig config;
  config.layers = 4;
  loc.minimum = 1;
  const auto deep = imot_star(loc, config);
  loc.minimum = deep.working_set_sizes.front() + 1;
  loc.minimum = std::min<std::size_t>(loc.minimum, 60);
  const auto backed = imot_star(loc, config);
  for (std::size_t size : backed.working_set_sizes) CHECK(size >= loc.minimum);

  loc.minimum = 99;
  try {
    (void)imot_star(loc, config);
    FAIL("expected InsufficientInliers");
  } catch (const InsufficientInliers& e) {
    CHECK(e.iteration() == 1);
  }

  loc.minimum = 101;
  CHECK_THROWS_AS(imot_star(loc, config), InsufficientInliers);
}

TEST_CASE("solver failures carry the iteration") {
  Location loc = clustered(10, 0, 7);
  loc.fail = true;
  try {
    (void)imot_star(loc, EstimatorConfig{});
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.iteration() == 1);
  }
}

TEST_CASE("perfect fit converges immediately") {
  Location loc;
  loc.data = std::vector<double>(8, 2.5);
  const auto r = imot_star(loc, EstimatorConfig{});
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.threshold_trace.front() == 0.0);
  CHECK(r.inliers.size() == 8);
}

TEST_CASE("imot refinement branches") {
  Location loc = clustered(80, 20, 8);
  EstimatorConfig config;
  const auto star = imot_star(loc, config);
  const double terminal = star.threshold_trace.back();

  SUBCASE("terminal threshold below 5 gamma: one refinement solve") {
    config.noise_bound = terminal;
    loc.solves = 0;
    const auto r = imot::imot(loc, config);
    CHECK(loc.solves == star.iterations + 1);
    CHECK(r.threshold_trace == star.threshold_trace);
  }

  SUBCASE("terminal threshold at 10 gamma: graded refinement") {
    const double gamma = terminal / 10.0;
    config.noise_bound = gamma;
    loc.solves = 0;
    const auto r = imot::imot(loc, config);
    CHECK(loc.solves == star.iterations + 3);

    config.final_resolve = false;
    loc.solves = 0;
    const auto literal = imot::imot(loc, config);
    CHECK(loc.solves == star.iterations + 2);
    for (std::size_t i : literal.inliers) CHECK(loc.residual(i, literal.solution) < gamma);
    CHECK(r.inliers == literal.inliers);
  }
}

TEST_CASE("estimators are deterministic") {
  Location loc = clustered(70, 30, 9);
  EstimatorConfig config;
  config.noise_bound = 0.3;
  const auto a = imot::imot(loc, config);
  const auto b = imot::imot(loc, config);
  CHECK(a.solution == b.solution);
  CHECK(a.inliers == b.inliers);
  CHECK(a.threshold_trace == b.threshold_trace);
}

TEST_CASE("fixed inliers stay in and are not thresholded") {
  PinnedLocation loc;
  static_cast<Location&>(loc) = clustered(40, 40, 10);
  loc.pinned = {0, 1, 2, 40};
  EstimatorConfig config;
  config.noise_bound = 0.3;
  const auto r = imot::imot(loc, config);
  for (std::size_t i : loc.pinned) CHECK(std::binary_search(r.inliers.begin(), r.inliers.end(), i));
  const auto star = imot_star(loc, config);
  for (std::size_t i : loc.pinned) CHECK(std::binary_search(star.inliers.begin(), star.inliers.end(), i));

  const MeasurementPartition p(6, std::vector<std::size_t>{4, 1});
  CHECK(p.fixed == std::vector<std::size_t>{1, 4});
  CHECK(p.free == std::vector<std::size_t>{0, 2, 3, 5});
  CHECK(p.with_fixed(std::vector<std::size_t>{3, 0}) == std::vector<std::size_t>{0, 1, 4, 5});
  CHECK_THROWS_AS(MeasurementPartition(3, std::vector<std::size_t>{3}), std::invalid_argument);
}

TEST_CASE("rotation search at 80% outliers keeps every true inlier") {
  synth::GeneratorSpec spec;
  spec.n = 500;
  spec.noise_sigma = 0.01;
  spec.outlier_ratio = 0.8;
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    const auto inst = synth::gen_rotation_search(spec);
    const problems::RotationSearch adapter(inst.measurements);
    EstimatorConfig config;
    config.layers = recommended_layer_count(spec.n);
    config.noise_bound = 6 * spec.noise_sigma;
    const auto r = imot::imot(adapter, config);
    const auto truth = inst.inlier_indices();
    if (std::includes(r.inliers.begin(), r.inliers.end(), truth.begin(), truth.end())) ++covered;
    CHECK(geodesic_distance(r.solution, inst.ground_truth) < 0.02);
  }
  CHECK(covered >= 9);
}

TEST_CASE("registration N=1000 at 90% outliers recovers the inlier set") {
  synth::GeneratorSpec spec;
  spec.n = 1000;
  spec.noise_sigma = 0.01;
  spec.outlier_ratio = 0.9;
  int good = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    spec.seed = 1000 + seed;
    const auto inst = synth::gen_registration(spec);
    const problems::Registration adapter(inst.measurements);
    EstimatorConfig config;
    config.layers = recommended_layer_count(spec.n);
    config.noise_bound = 5 * spec.noise_sigma;
    try {
      const auto r = imot::imot(adapter, config);
      // Outliers that happen to land within γ of their true target cannot be
      // told apart from inliers and are not counted against the estimator.
      std::size_t hits = 0;
      std::size_t false_hits = 0;
      for (std::size_t i : r.inliers) {
        if (inst.inlier_mask[i]) {
          ++hits;
        } else if (problems::reg_residual(inst.measurements[i], inst.ground_truth) > *config.noise_bound) {
          ++false_hits;
        }
      }
      if (false_hits == 0 && hits >= 95) ++good;
    } catch (const EstimationError&) {
    }
  }
  CHECK(good >= 28);
}
