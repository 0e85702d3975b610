#include "imot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "imot/errors.hpp"

namespace imot::synth {

using problems::CategoryCorrespondence;
using problems::EdgeKind;
using problems::PointCorrespondence;
using problems::PoseGraph;
using problems::PoseGraphEdge;
using problems::VectorCorrespondence;

void GeneratorSpec::validate() const {
  if (n == 0) throw std::invalid_argument("GeneratorSpec: n must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("GeneratorSpec: noise_sigma must be >= 0");
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) {
    throw std::invalid_argument("GeneratorSpec: outlier_ratio must be in [0, 1)");
  }
  if (shape_count < 1) throw std::invalid_argument("GeneratorSpec: shape_count must be >= 1");
}

std::size_t GeneratorSpec::outlier_count() const {
  // The small epsilon keeps e.g. 0.7 * 100 from flooring to 69.
  return static_cast<std::size_t>(std::floor(outlier_ratio * static_cast<double>(n) + 1e-9));
}

namespace {

Vec3 gaussian_vec(Rng& rng, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  return {g(rng), g(rng), g(rng)};
}

Vec3 uniform_cube(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

/// Random labels: exactly `outliers` entries false.
std::vector<bool> make_inlier_mask(std::size_t n, std::size_t outliers, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> mask(n, true);
  for (std::size_t i = 0; i < outliers; ++i) mask[order[i]] = false;
  return mask;
}

RigidTransform3 random_transform(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RigidTransform3 x;
  x.rotation = random_rotation(rng);
  x.translation = Vec3{u(rng), u(rng), u(rng)};
  return x;
}

}  // namespace

Rotation3 random_rotation(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
    if (w * w + x * x + y * y + z * z > 1e-12) return rotation_from_quaternion(w, x, y, z);
  }
}

Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

RotationAveragingInstance gen_rotation_averaging(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  RotationAveragingInstance inst;
  inst.noise_sigma = spec.noise_sigma;
  inst.ground_truth = random_rotation(rng);
  inst.inlier_mask = make_inlier_mask(spec.n, spec.outlier_count(), rng);
  std::normal_distribution<double> angle(0.0, spec.noise_sigma);
  inst.measurements.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (inst.inlier_mask[i]) {
      const Vec3 axis = random_unit_vector(rng);
      inst.measurements.push_back(inst.ground_truth * exp_map_so3(axis, angle(rng)));
    } else {
      inst.measurements.push_back(random_rotation(rng));
    }
  }
  return inst;
}

RotationSearchInstance gen_rotation_search(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  RotationSearchInstance inst;
  inst.noise_sigma = spec.noise_sigma;
  inst.ground_truth = random_rotation(rng);
  inst.inlier_mask = make_inlier_mask(spec.n, spec.outlier_count(), rng);
  inst.measurements.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    VectorCorrespondence m;
    m.p = random_unit_vector(rng);
    if (inst.inlier_mask[i]) {
      m.q = inst.ground_truth * m.p + gaussian_vec(rng, spec.noise_sigma);
    } else {
      m.q = random_unit_vector(rng);
    }
    inst.measurements.push_back(m);
  }
  return inst;
}

RegistrationInstance gen_registration(const GeneratorSpec& spec, std::span<const Vec3> source_points) {
  spec.validate();
  Rng rng(spec.seed);
  RegistrationInstance inst;
  inst.noise_sigma = spec.noise_sigma;
  inst.ground_truth = random_transform(rng);
  inst.inlier_mask = make_inlier_mask(spec.n, spec.outlier_count(), rng);

  std::vector<Vec3> sources;
  if (source_points.empty()) {
    sources.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) sources.push_back(uniform_cube(rng));
  } else {
    if (source_points.size() < spec.n) {
      throw std::invalid_argument("gen_registration: point file has fewer than n points");
    }
    const std::vector<Vec3> scaled = fit_unit_cube(source_points);
    std::vector<std::size_t> order(scaled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < spec.n; ++i) sources.push_back(scaled[order[i]]);
  }

  inst.measurements.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    PointCorrespondence m{sources[i], Vec3::Zero()};
    if (inst.inlier_mask[i]) {
      m.b = inst.ground_truth.apply(m.a) + gaussian_vec(rng, spec.noise_sigma);
    } else {
      m.b = inst.ground_truth.apply(uniform_cube(rng));
    }
    inst.measurements.push_back(m);
  }
  return inst;
}

CategoryInstance gen_category(const GeneratorSpec& spec, double shape_variation) {
  spec.validate();
  if (!(shape_variation >= 0.0)) throw std::invalid_argument("gen_category: shape_variation must be >= 0");
  Rng rng(spec.seed);
  const int k = spec.shape_count;
  CategoryInstance inst;
  inst.noise_sigma = spec.noise_sigma;
  inst.ground_truth.pose = random_transform(rng);
  inst.inlier_mask = make_inlier_mask(spec.n, spec.outlier_count(), rng);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd c(k);
  for (int j = 0; j < k; ++j) c(j) = unit(rng);
  c /= c.sum();
  inst.ground_truth.shape = c;

  inst.measurements.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    CategoryCorrespondence m;
    const Vec3 mean = uniform_cube(rng);
    m.basis.resize(3, k);
    for (int j = 0; j < k; ++j) {
      m.basis.col(j) = k == 1 ? mean : Vec3(mean + gaussian_vec(rng, shape_variation));
    }
    if (inst.inlier_mask[i]) {
      m.y = inst.ground_truth.pose.apply(m.basis * c) + gaussian_vec(rng, spec.noise_sigma);
    } else {
      m.y = inst.ground_truth.pose.apply(uniform_cube(rng));
    }
    inst.measurements.push_back(std::move(m));
  }
  return inst;
}

std::vector<Vec3> load_point_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open point file: " + path.string());
  std::vector<Vec3> points;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Vec3 p;
    std::string extra;
    if (!(fields >> p.x() >> p.y() >> p.z()) || (fields >> extra)) {
      throw ParseError("expected three decimals", number);
    }
    if (!p.allFinite()) throw ParseError("non-finite coordinate", number);
    points.push_back(p);
  }
  return points;
}

std::vector<Vec3> fit_unit_cube(std::span<const Vec3> points) {
  if (points.empty()) return {};
  Vec3 lo = points.front();
  Vec3 hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = (hi - lo).maxCoeff();
  const double scale = extent > 0.0 ? 1.0 / extent : 1.0;
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back((p - lo) * scale);
  return out;
}

PoseGraphInstance gen_grid_pose_graph(const GridGraphSpec& spec) {
  if (spec.columns < 2 || spec.rows < 2) throw std::invalid_argument("gen_grid_pose_graph: grid too small");
  if (!(spec.translation_sigma > 0.0 && spec.rotation_sigma > 0.0)) {
    throw std::invalid_argument("gen_grid_pose_graph: noise sigmas must be positive");
  }
  Rng rng(spec.seed);
  const int m = spec.columns * spec.rows;

  std::vector<Vec2> position(static_cast<std::size_t>(m));
  for (int v = 0; v < m; ++v) {
    const int row = v / spec.columns;
    const int col = v % spec.columns;
    const int x = row % 2 == 0 ? col : spec.columns - 1 - col;
    position[static_cast<std::size_t>(v)] = Vec2(x * spec.spacing, row * spec.spacing);
  }
  PoseGraphInstance inst;
  inst.ground_truth.resize(static_cast<std::size_t>(m));
  for (int v = 0; v < m; ++v) {
    const auto i = static_cast<std::size_t>(v);
    const Vec2 heading = v + 1 < m ? Vec2(position[i + 1] - position[i]) : Vec2(position[i] - position[i - 1]);
    inst.ground_truth[i] = Pose2(std::atan2(heading.y(), heading.x()), position[i].x(), position[i].y());
  }

  std::normal_distribution<double> dt(0.0, spec.translation_sigma);
  std::normal_distribution<double> dr(0.0, spec.rotation_sigma);
  const double wt = 1.0 / (spec.translation_sigma * spec.translation_sigma);
  const double wr = 1.0 / (spec.rotation_sigma * spec.rotation_sigma);
  auto noisy_between = [&](int from, int to) {
    const Pose2 rel = inst.ground_truth[static_cast<std::size_t>(from)].between(
        inst.ground_truth[static_cast<std::size_t>(to)]);
    const double th = rel.theta() + dr(rng);
    const double x = rel.x() + dt(rng);
    const double y = rel.y() + dt(rng);
    return Pose2(th, x, y);
  };

  PoseGraph& g = inst.graph;
  g.vertex_ids.resize(static_cast<std::size_t>(m));
  std::iota(g.vertex_ids.begin(), g.vertex_ids.end(), 0);
  for (int v = 0; v + 1 < m; ++v) {
    g.edges.push_back(PoseGraphEdge::make(v, v + 1, noisy_between(v, v + 1), wt, wr, EdgeKind::Odometry));
  }

  std::vector<std::pair<int, int>> candidates;
  for (int u = 0; u < m; ++u) {
    for (int v = u + 2; v < m; ++v) {
      const double d = (position[static_cast<std::size_t>(u)] - position[static_cast<std::size_t>(v)]).norm();
      if (d <= spec.spacing * 1.01) candidates.emplace_back(u, v);
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(std::min(candidates.size(), spec.loop_closures));
  std::sort(candidates.begin(), candidates.end());
  for (auto [u, v] : candidates) {
    g.edges.push_back(PoseGraphEdge::make(u, v, noisy_between(u, v), wt, wr, EdgeKind::LoopClosure));
  }

  g.vertex_estimates = problems::compose_odometry(g);
  inst.inlier_mask.assign(g.edges.size(), true);
  return inst;
}

CorruptedGraph corrupt_loop_closures(const PoseGraph& graph, double outlier_ratio, std::uint64_t seed) {
  if (!(outlier_ratio >= 0.0 && outlier_ratio <= 1.0)) {
    throw std::invalid_argument("corrupt_loop_closures: ratio must be in [0, 1]");
  }
  std::vector<std::size_t> loops = graph.loop_closure_edges();
  if (loops.empty()) throw std::invalid_argument("corrupt_loop_closures: graph has no loop closures");

  CorruptedGraph out{graph, std::vector<bool>(graph.edges.size(), true)};
  const auto count =
      static_cast<std::size_t>(std::floor(outlier_ratio * static_cast<double>(loops.size()) + 1e-9));
  if (count == 0) return out;

  const std::vector<Pose2> trajectory = problems::compose_odometry(graph);
  Vec2 lo = trajectory.front().translation();
  Vec2 hi = lo;
  for (const auto& p : trajectory) {
    lo = lo.cwiseMin(p.translation());
    hi = hi.cwiseMax(p.translation());
  }
  const Vec2 extent = (hi - lo).cwiseMax(Vec2::Constant(1e-3));

  Rng rng(seed);
  std::shuffle(loops.begin(), loops.end(), rng);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> ux(-extent.x(), extent.x());
  std::uniform_real_distribution<double> uy(-extent.y(), extent.y());
  for (std::size_t j = 0; j < count; ++j) {
    auto& e = out.graph.edges[loops[j]];
    const double th = angle(rng);
    const double x = ux(rng);
    const double y = uy(rng);
    e.measurement = Pose2(th, x, y);
    out.inlier_mask[loops[j]] = false;
  }
  return out;
}

}  // namespace imot::synth
