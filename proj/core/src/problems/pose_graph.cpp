#include "imot/problems/pose_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "imot/problems/weights.hpp"

namespace imot::problems {

PoseGraphEdge PoseGraphEdge::make(int from, int to, const Pose2& measurement, double translation_weight,
                                  double rotation_weight, EdgeKind kind) {
  PoseGraphEdge e;
  e.from = from;
  e.to = to;
  e.measurement = measurement;
  e.information = {translation_weight, 0.0, 0.0, translation_weight, 0.0, rotation_weight};
  e.kind = kind;
  return e;
}

std::vector<std::size_t> PoseGraph::odometry_edges() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].kind == EdgeKind::Odometry) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> PoseGraph::loop_closure_edges() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].kind == EdgeKind::LoopClosure) out.push_back(i);
  }
  return out;
}

double pgo_residual(const PoseGraphEdge& edge, std::span<const Pose2> poses) {
  const Pose2& from = poses[static_cast<std::size_t>(edge.from)];
  const Pose2& to = poses[static_cast<std::size_t>(edge.to)];
  const Mat2 r_from = from.rotation();
  const double rot = (to.rotation() - r_from * edge.measurement.rotation()).squaredNorm();
  const double trans =
      (to.translation() - from.translation() - r_from * edge.measurement.translation()).squaredNorm();
  return std::sqrt(0.5 * edge.rotation_weight() * rot + edge.translation_weight() * trans);
}

double pose_graph_cost(const PoseGraph& graph, std::span<const std::size_t> subset,
                       std::span<const Pose2> poses, std::span<const double> weights) {
  const WeightView w(subset, weights);
  double cost = 0.0;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const double r = pgo_residual(graph.edges[subset[j]], poses);
    cost += w[j] * r * r;
  }
  return cost;
}

namespace {

struct DisjointSet {
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

void check_edge_indices(const PoseGraph& graph, std::span<const std::size_t> subset) {
  const auto m = static_cast<int>(graph.vertex_count());
  for (std::size_t i : subset) {
    if (i >= graph.edges.size()) throw std::invalid_argument("pose graph: edge index out of range");
    const auto& e = graph.edges[i];
    if (e.from < 0 || e.to < 0 || e.from >= m || e.to >= m) {
      throw std::invalid_argument("pose graph: edge references unknown vertex");
    }
  }
}

/// Accumulates a sparse linear least-squares problem A x ≈ b and solves the
/// normal equations.
class SparseLeastSquares {
 public:
  explicit SparseLeastSquares(Eigen::Index unknowns) : unknowns_(unknowns) {}

  Eigen::Index add_row(double rhs) {
    rhs_.push_back(rhs);
    return static_cast<Eigen::Index>(rhs_.size() - 1);
  }
  void add(Eigen::Index row, Eigen::Index col, double value) { triplets_.emplace_back(row, col, value); }

  Eigen::VectorXd solve(double damping) const {
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(rhs_.size()), unknowns_);
    a.setFromTriplets(triplets_.begin(), triplets_.end());
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size()));
    Eigen::SparseMatrix<double> normal = a.transpose() * a;
    const Eigen::VectorXd g = a.transpose() * b;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(normal);
    if (ldlt.info() != Eigen::Success) {
      Eigen::SparseMatrix<double> id(unknowns_, unknowns_);
      id.setIdentity();
      normal += damping * id;
      ldlt.compute(normal);
      if (ldlt.info() != Eigen::Success) throw std::runtime_error("sparse least squares: factorization failed");
    }
    return ldlt.solve(g);
  }

 private:
  Eigen::Index unknowns_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> rhs_;
};

constexpr double kDefaultDamping = 1e-6;

}  // namespace

bool is_connected(const PoseGraph& graph, std::span<const std::size_t> subset, std::span<const double> weights) {
  const std::size_t m = graph.vertex_count();
  if (m <= 1) return true;
  check_edge_indices(graph, subset);
  const WeightView w(subset, weights);
  DisjointSet sets(m);
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto& e = graph.edges[subset[j]];
    sets.unite(static_cast<std::size_t>(e.from), static_cast<std::size_t>(e.to));
  }
  const std::size_t root = sets.find(0);
  for (std::size_t v = 1; v < m; ++v) {
    if (sets.find(v) != root) return false;
  }
  return true;
}

std::vector<Pose2> compose_odometry(const PoseGraph& graph) {
  std::vector<Pose2> poses(graph.vertex_count());
  std::vector<bool> known(graph.vertex_count(), false);
  if (!poses.empty()) known[0] = true;
  // Odometry edges may be listed in any order; sweep until nothing changes.
  const auto odometry = graph.odometry_edges();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i : odometry) {
      const auto& e = graph.edges[i];
      const auto f = static_cast<std::size_t>(e.from);
      const auto t = static_cast<std::size_t>(e.to);
      if (known[f] && !known[t]) {
        poses[t] = poses[f] * e.measurement;
        known[t] = changed = true;
      } else if (known[t] && !known[f]) {
        poses[f] = poses[t] * e.measurement.inverse();
        known[f] = changed = true;
      }
    }
  }
  return poses;
}

std::vector<Pose2> chordal_initialization(const PoseGraph& graph, std::span<const std::size_t> subset,
                                          std::span<const double> weights) {
  const std::size_t m = graph.vertex_count();
  if (!is_connected(graph, subset, weights)) {
    throw std::invalid_argument("pose graph: edge subset leaves the graph disconnected");
  }
  std::vector<Pose2> poses(m);
  if (m <= 1) return poses;
  const WeightView w(subset, weights);
  const auto unknowns = static_cast<Eigen::Index>(2 * (m - 1));
  auto col = [](int vertex, int k) { return static_cast<Eigen::Index>(2 * (vertex - 1) + k); };

  // Rotations, relaxed: (cos θ_to, sin θ_to) = R(θ_z) (cos θ_from, sin θ_from),
  // with vertex 0 pinned at (1, 0).
  SparseLeastSquares rot(unknowns);
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto& e = graph.edges[subset[j]];
    const double s = std::sqrt(w[j] * e.rotation_weight());
    const Mat2 rz = e.measurement.rotation();
    for (int r = 0; r < 2; ++r) {
      double rhs = 0.0;
      if (e.to == 0) rhs -= s * (r == 0 ? 1.0 : 0.0);
      if (e.from == 0) rhs += s * rz(r, 0);
      const Eigen::Index row = rot.add_row(rhs);
      if (e.to != 0) rot.add(row, col(e.to, r), s);
      if (e.from != 0) {
        rot.add(row, col(e.from, 0), -s * rz(r, 0));
        rot.add(row, col(e.from, 1), -s * rz(r, 1));
      }
    }
  }
  const Eigen::VectorXd cs = rot.solve(kDefaultDamping);
  std::vector<double> theta(m, 0.0);
  for (std::size_t v = 1; v < m; ++v) {
    const auto vi = static_cast<int>(v);
    theta[v] = std::atan2(cs(col(vi, 1)), cs(col(vi, 0)));
  }

  // Translations given rotations: t_to − t_from = R(θ_from) t_z, t_0 = 0.
  SparseLeastSquares trans(unknowns);
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto& e = graph.edges[subset[j]];
    const double s = std::sqrt(w[j] * e.translation_weight());
    const Vec2 offset = rotation2(theta[static_cast<std::size_t>(e.from)]) * e.measurement.translation();
    for (int r = 0; r < 2; ++r) {
      const Eigen::Index row = trans.add_row(s * offset(r));
      if (e.to != 0) trans.add(row, col(e.to, r), s);
      if (e.from != 0) trans.add(row, col(e.from, r), -s);
    }
  }
  const Eigen::VectorXd xy = trans.solve(kDefaultDamping);
  for (std::size_t v = 1; v < m; ++v) {
    const auto vi = static_cast<int>(v);
    poses[v] = Pose2(theta[v], xy(col(vi, 0)), xy(col(vi, 1)));
  }
  return poses;
}

namespace {

/// Gauss-Newton normal equations for the edges in `subset`; returns the cost.
double accumulate_normal_equations(const PoseGraph& graph, std::span<const std::size_t> subset,
                                   const WeightView& w, std::span<const Pose2> poses,
                                   std::vector<Eigen::Triplet<double>>& hessian, Eigen::VectorXd& gradient) {
  using Mat46 = Eigen::Matrix<double, 4, 6>;
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  hessian.clear();
  gradient.setZero();
  double cost = 0.0;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (w[j] == 0.0) continue;
    const auto& e = graph.edges[subset[j]];
    const Pose2& from = poses[static_cast<std::size_t>(e.from)];
    const Pose2& to = poses[static_cast<std::size_t>(e.to)];
    const double sr = std::sqrt(w[j] * e.rotation_weight());
    const double st = std::sqrt(w[j] * e.translation_weight());
    const double a = from.theta() + e.measurement.theta();
    const double cf = std::cos(from.theta());
    const double sf = std::sin(from.theta());
    const Vec2 tz = e.measurement.translation();
    const Vec2 rtz(cf * tz.x() - sf * tz.y(), sf * tz.x() + cf * tz.y());
    const Vec2 drtz(-sf * tz.x() - cf * tz.y(), cf * tz.x() - sf * tz.y());

    // The 2x2 rotation difference has two distinct entries, each appearing
    // twice, so ‖ΔR‖²_F·ω/2 = ω·(Δc² + Δs²).
    Vec4 r;
    r << sr * (std::cos(to.theta()) - std::cos(a)), sr * (std::sin(to.theta()) - std::sin(a)),
        st * (to.x() - from.x() - rtz.x()), st * (to.y() - from.y() - rtz.y());
    cost += r.squaredNorm();

    // Columns: θ_from, x_from, y_from, θ_to, x_to, y_to.
    Mat46 jac = Mat46::Zero();
    jac(0, 0) = sr * std::sin(a);
    jac(1, 0) = -sr * std::cos(a);
    jac(0, 3) = -sr * std::sin(to.theta());
    jac(1, 3) = sr * std::cos(to.theta());
    jac(2, 0) = -st * drtz.x();
    jac(3, 0) = -st * drtz.y();
    jac(2, 1) = -st;
    jac(3, 2) = -st;
    jac(2, 4) = st;
    jac(3, 5) = st;

    const Eigen::Matrix<double, 6, 6> h = jac.transpose() * jac;
    const Eigen::Matrix<double, 6, 1> g = jac.transpose() * r;
    const int vertex[2] = {e.from, e.to};
    for (int bi = 0; bi < 2; ++bi) {
      if (vertex[bi] == 0) continue;
      const Eigen::Index row0 = 3 * (vertex[bi] - 1);
      gradient.segment<3>(row0) += g.segment<3>(3 * bi);
      for (int bj = 0; bj < 2; ++bj) {
        if (vertex[bj] == 0) continue;
        const Eigen::Index col0 = 3 * (vertex[bj] - 1);
        for (int u = 0; u < 3; ++u) {
          for (int v = 0; v < 3; ++v) hessian.emplace_back(row0 + u, col0 + v, h(3 * bi + u, 3 * bj + v));
        }
      }
    }
  }
  return cost;
}

}  // namespace

std::vector<Pose2> solve_pose_graph(const PoseGraph& graph, std::span<const std::size_t> subset,
                                    std::span<const double> weights, const PoseGraphSolverOptions& options) {
  std::vector<Pose2> poses = chordal_initialization(graph, subset, weights);
  const std::size_t m = graph.vertex_count();
  if (m <= 1) return poses;

  const WeightView w(subset, weights);
  const auto unknowns = static_cast<Eigen::Index>(3 * (m - 1));
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd gradient(unknowns);
  Eigen::SparseMatrix<double> hessian(unknowns, unknowns);
  Eigen::SparseMatrix<double> identity(unknowns, unknowns);
  identity.setIdentity();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  auto apply_step = [&](const std::vector<Pose2>& base, const Eigen::VectorXd& step) {
    std::vector<Pose2> next = base;
    for (std::size_t v = 1; v < m; ++v) {
      const auto k = static_cast<Eigen::Index>(3 * (v - 1));
      next[v] = Pose2(base[v].theta() + step(k), base[v].x() + step(k + 1), base[v].y() + step(k + 2));
    }
    return next;
  };

  double cost = accumulate_normal_equations(graph, subset, w, poses, triplets, gradient);
  double lambda = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    hessian.setFromTriplets(triplets.begin(), triplets.end());
    ldlt.compute(hessian);
    if (ldlt.info() != Eigen::Success) {
      lambda = std::max(lambda, options.damping);
    }

    // Gauss-Newton step; damping only enters when the normal equations are
    // singular or a step fails to reduce the cost.
    bool accepted = false;
    Eigen::VectorXd step;
    std::vector<Pose2> candidate;
    for (int attempt = 0; attempt < 12; ++attempt) {
      if (lambda > 0.0) {
        const Eigen::SparseMatrix<double> damped = hessian + lambda * identity;
        ldlt.compute(damped);
        if (ldlt.info() != Eigen::Success) {
          lambda *= 10.0;
          continue;
        }
      }
      step = ldlt.solve(-gradient);
      candidate = apply_step(poses, step);
      const double next_cost = pose_graph_cost(graph, subset, candidate, weights);
      if (next_cost <= cost || step.norm() < options.step_tolerance) {
        accepted = true;
        break;
      }
      lambda = lambda == 0.0 ? options.damping : lambda * 10.0;
    }
    if (!accepted) break;
    poses = std::move(candidate);
    if (step.norm() < options.step_tolerance) break;
    lambda = 0.0;
    cost = accumulate_normal_equations(graph, subset, w, poses, triplets, gradient);
  }
  return poses;
}

PoseGraphProblem::PoseGraphProblem(const PoseGraph& graph, bool always_include_odometry)
    : graph_(&graph), include_odometry_(always_include_odometry), odometry_(graph.odometry_edges()) {}

std::size_t PoseGraphProblem::min_measurements() const {
  if (include_odometry_) return 1;
  return graph_->vertex_count() > 1 ? graph_->vertex_count() - 1 : 1;
}

PoseGraphProblem::Solution PoseGraphProblem::solve(std::span<const std::size_t> subset,
                                                   std::span<const double> weights) const {
  if (!include_odometry_) return solve_pose_graph(*graph_, subset, weights);

  const WeightView w(subset, weights);
  std::vector<double> edge_weight(graph_->edges.size(), 0.0);
  for (std::size_t j = 0; j < subset.size(); ++j) edge_weight[subset[j]] = w[j];
  for (std::size_t i : odometry_) edge_weight[i] = 1.0;

  std::vector<std::size_t> merged;
  std::vector<double> merged_weights;
  for (std::size_t i = 0; i < edge_weight.size(); ++i) {
    if (edge_weight[i] > 0.0) {
      merged.push_back(i);
      merged_weights.push_back(edge_weight[i]);
    }
  }
  return solve_pose_graph(*graph_, merged, merged_weights);
}

}  // namespace imot::problems
