#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "imot/geometry.hpp"
#include "imot/problems/category.hpp"
#include "imot/problems/pose_graph.hpp"
#include "imot/problems/registration.hpp"
#include "imot/problems/rotation_search.hpp"

namespace imot::synth {

using Rng = std::mt19937_64;

struct GeneratorSpec {
  std::size_t n = 100;
  /// Inlier noise. Radians for rotation averaging, otherwise the per-axis
  /// standard deviation in the measurement's units.
  double noise_sigma = 0.01;
  /// Fraction ρ ∈ [0, 1) of measurements replaced by outliers (⌊ρN⌋ of them).
  double outlier_ratio = 0.0;
  int shape_count = 1;  // K, category-level only
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t outlier_count() const;
};

template <class Measurement, class Truth>
struct ProblemInstance {
  std::vector<Measurement> measurements;
  Truth ground_truth{};
  std::vector<bool> inlier_mask;
  double noise_sigma = 0.0;

  std::vector<std::size_t> inlier_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < inlier_mask.size(); ++i) {
      if (inlier_mask[i]) out.push_back(i);
    }
    return out;
  }
};

struct CategoryTruth {
  RigidTransform3 pose;
  Eigen::VectorXd shape;
};

using RotationAveragingInstance = ProblemInstance<Rotation3, Rotation3>;
using RotationSearchInstance = ProblemInstance<problems::VectorCorrespondence, Rotation3>;
using RegistrationInstance = ProblemInstance<problems::PointCorrespondence, RigidTransform3>;
using CategoryInstance = ProblemInstance<problems::CategoryCorrespondence, CategoryTruth>;

/// Uniform on SO(3) (normalized Gaussian quaternion).
Rotation3 random_rotation(Rng& rng);
Vec3 random_unit_vector(Rng& rng);

/// R_i = R_gt Exp(ζ_i e_i), ζ_i ~ N(0, σ²), e_i uniform on S²; outliers are
/// uniform random rotations.
RotationAveragingInstance gen_rotation_averaging(const GeneratorSpec& spec);

/// q_i = R_gt p_i + N(0, σ² I) for random unit p_i; outlier q_i are random unit vectors.
RotationSearchInstance gen_rotation_search(const GeneratorSpec& spec);

/// b_i = R_gt a_i + t_gt + N(0, σ² I). Sources are uniform in [0, 1]³, or
/// drawn (without replacement) from `source_points` rescaled into the unit
/// cube. Outlier targets are uniform in the image of the unit cube under the
/// ground-truth transform.
RegistrationInstance gen_registration(const GeneratorSpec& spec, std::span<const Vec3> source_points = {});

/// Category-level instance: a mean shape uniform in [0, 1]³, K basis shapes
/// perturbing it by N(0, shape_variation²) per coordinate, c_gt uniform on
/// [0, 1] normalized to sum 1, y_i = R_gt Σ c_k b_k(i) + t_gt + noise.
/// With K = 1 the single basis is the mean shape itself. Outlier y_i are
/// uniform in the image of the unit cube under the ground-truth pose.
CategoryInstance gen_category(const GeneratorSpec& spec, double shape_variation = 0.3);

/// Plain-text point file: one point per line, three whitespace-separated
/// decimals. Blank lines and lines starting with '#' are skipped.
std::vector<Vec3> load_point_file(const std::filesystem::path& path);

/// Translates and uniformly scales points so they fit in [0, 1]³.
std::vector<Vec3> fit_unit_cube(std::span<const Vec3> points);

struct GridGraphSpec {
  int columns = 20;
  int rows = 10;
  double spacing = 1.0;
  std::size_t loop_closures = 50;
  double translation_sigma = 0.05;
  double rotation_sigma = 0.01;
  std::uint64_t seed = 0;
};

struct PoseGraphInstance {
  problems::PoseGraph graph;
  std::vector<Pose2> ground_truth;
  std::vector<bool> inlier_mask;  // per edge
};

/// Serpentine walk over a rows x columns grid. Odometry links consecutive
/// vertices; loop closures join grid neighbours on adjacent rows. Edge
/// information is diag(1/σ_t², 1/σ_t², 1/σ_θ²). vertex_estimates hold the
/// dead-reckoned trajectory. Both sigmas must be positive.
PoseGraphInstance gen_grid_pose_graph(const GridGraphSpec& spec);

struct CorruptedGraph {
  problems::PoseGraph graph;
  std::vector<bool> inlier_mask;  // per edge
};

/// Replaces ⌊ρ·#loop-closures⌋ randomly chosen loop closures by random
/// relative poses (θ uniform, translation uniform in a box the size of the
/// dead-reckoned trajectory's extent). Odometry and information matrices are
/// untouched. Throws std::invalid_argument if the graph has no loop closures.
CorruptedGraph corrupt_loop_closures(const problems::PoseGraph& graph, double outlier_ratio, std::uint64_t seed);

}  // namespace imot::synth
