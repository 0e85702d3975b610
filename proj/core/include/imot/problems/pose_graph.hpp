#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "imot/geometry.hpp"

namespace imot::problems {

enum class EdgeKind { Odometry, LoopClosure };

/// Relative-pose measurement: `measurement` is the pose of `to` expressed in
/// the frame of `from` (g2o EDGE_SE2 convention). Vertex indices are dense.
struct PoseGraphEdge {
  int from = 0;
  int to = 0;
  Pose2 measurement;
  /// Upper triangle of the 3x3 information matrix over (x, y, θ):
  /// i11 i12 i13 i22 i23 i33.
  std::array<double, 6> information{1.0, 0.0, 0.0, 1.0, 0.0, 1.0};
  EdgeKind kind = EdgeKind::LoopClosure;

  /// ω^t: mean of the translational diagonal.
  double translation_weight() const { return 0.5 * (information[0] + information[3]); }
  /// ω^R: rotational diagonal entry.
  double rotation_weight() const { return information[5]; }

  static PoseGraphEdge make(int from, int to, const Pose2& measurement, double translation_weight,
                            double rotation_weight, EdgeKind kind);
};

struct PoseGraph {
  /// Original vertex ids; dense index i corresponds to vertex_ids[i].
  std::vector<int> vertex_ids;
  /// Initial or ground-truth estimates, one per vertex (may be empty).
  std::vector<Pose2> vertex_estimates;
  std::vector<PoseGraphEdge> edges;

  std::size_t vertex_count() const { return vertex_ids.size(); }
  std::vector<std::size_t> odometry_edges() const;
  std::vector<std::size_t> loop_closure_edges() const;
};

/// sqrt(ω^R/2 ‖R_to − R_from R_z‖²_F + ω^t ‖t_to − t_from − R_from t_z‖²).
double pgo_residual(const PoseGraphEdge& edge, std::span<const Pose2> poses);

/// Σ w_e · residual_e² over `subset` (weights empty or parallel to subset).
double pose_graph_cost(const PoseGraph& graph, std::span<const std::size_t> subset,
                       std::span<const Pose2> poses, std::span<const double> weights = {});

/// True if the weighted edges in `subset` connect every vertex.
bool is_connected(const PoseGraph& graph, std::span<const std::size_t> subset,
                  std::span<const double> weights = {});

/// Dead-reckoned trajectory from the odometry chain, vertex 0 at the origin.
std::vector<Pose2> compose_odometry(const PoseGraph& graph);

struct PoseGraphSolverOptions {
  int max_iterations = 50;
  double step_tolerance = 1e-9;
  double damping = 1e-6;
};

/// Relaxed linear rotation estimate (cos θ, sin θ per vertex) projected back
/// to angles, then a linear translation solve. Vertex 0 is the gauge.
std::vector<Pose2> chordal_initialization(const PoseGraph& graph, std::span<const std::size_t> subset,
                                          std::span<const double> weights = {});

/// Chordal initialization followed by Gauss-Newton on (θ, x, y) of every
/// vertex except vertex 0. Throws std::invalid_argument if the subset leaves
/// the graph disconnected.
std::vector<Pose2> solve_pose_graph(const PoseGraph& graph, std::span<const std::size_t> subset,
                                    std::span<const double> weights = {},
                                    const PoseGraphSolverOptions& options = {});

/// 2D pose graph optimization. With `always_include_odometry`, every solve
/// adds the odometry chain at unit weight, so any subset stays connected.
class PoseGraphProblem {
 public:
  using Solution = std::vector<Pose2>;

  explicit PoseGraphProblem(const PoseGraph& graph, bool always_include_odometry = true);

  std::size_t measurement_count() const { return graph_->edges.size(); }
  double residual(std::size_t i, const Solution& poses) const {
    return pgo_residual(graph_->edges[i], poses);
  }
  Solution solve(std::span<const std::size_t> subset, std::span<const double> weights) const;
  std::size_t min_measurements() const;
  std::optional<std::vector<std::size_t>> seed_set() const { return odometry_; }
  /// The odometry chain when it is always included, otherwise empty.
  std::vector<std::size_t> fixed_inliers() const {
    return include_odometry_ ? odometry_ : std::vector<std::size_t>{};
  }

 private:
  const PoseGraph* graph_;
  bool include_odometry_;
  std::vector<std::size_t> odometry_;
};

}  // namespace imot::problems
