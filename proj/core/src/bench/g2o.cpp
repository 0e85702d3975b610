#include "imot/bench/g2o.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "imot/errors.hpp"

namespace imot::bench {

using problems::EdgeKind;
using problems::PoseGraph;
using problems::PoseGraphEdge;

namespace {

struct RawEdge {
  int from_id;
  int to_id;
  Pose2 measurement;
  std::array<double, 6> information;
};

template <class... Ts>
bool read_fields(std::istringstream& fields, Ts&... values) {
  if (!(fields >> ... >> values)) return false;
  std::string extra;
  return !(fields >> extra);
}

}  // namespace

PoseGraph parse_g2o_2d(std::istream& in, std::vector<std::string>* warnings) {
  std::map<int, Pose2> vertices;
  std::vector<RawEdge> raw_edges;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag.front() == '#') continue;
    if (tag == "VERTEX_SE2") {
      int id = 0;
      double x = 0, y = 0, th = 0;
      if (!read_fields(fields, id, x, y, th)) throw ParseError("malformed VERTEX_SE2", number);
      if (!vertices.emplace(id, Pose2(th, x, y)).second) throw ParseError("duplicate vertex id", number);
    } else if (tag == "EDGE_SE2") {
      RawEdge e{};
      double dx = 0, dy = 0, dth = 0;
      auto& info = e.information;
      if (!read_fields(fields, e.from_id, e.to_id, dx, dy, dth, info[0], info[1], info[2], info[3], info[4],
                       info[5])) {
        throw ParseError("malformed EDGE_SE2", number);
      }
      if (!std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(dth)) {
        throw ParseError("non-finite measurement", number);
      }
      e.measurement = Pose2(dth, dx, dy);
      raw_edges.push_back(e);
    } else if (warnings) {
      warnings->push_back("line " + std::to_string(number) + ": skipped unsupported tag " + tag);
    }
  }

  // Edges may reference vertices that have no VERTEX_SE2 line.
  for (const auto& e : raw_edges) {
    vertices.try_emplace(e.from_id);
    vertices.try_emplace(e.to_id);
  }

  PoseGraph graph;
  std::map<int, int> dense;
  for (const auto& [id, pose] : vertices) {
    dense[id] = static_cast<int>(graph.vertex_ids.size());
    graph.vertex_ids.push_back(id);
    graph.vertex_estimates.push_back(pose);
  }
  for (const auto& e : raw_edges) {
    PoseGraphEdge edge;
    edge.from = dense.at(e.from_id);
    edge.to = dense.at(e.to_id);
    edge.measurement = e.measurement;
    edge.information = e.information;
    edge.kind = std::abs(e.from_id - e.to_id) == 1 ? EdgeKind::Odometry : EdgeKind::LoopClosure;
    graph.edges.push_back(edge);
  }
  return graph;
}

PoseGraph parse_g2o_2d(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open g2o file: " + path.string());
  return parse_g2o_2d(in, warnings);
}

void write_g2o_2d(std::ostream& out, const PoseGraph& graph) {
  const auto old_precision = out.precision(17);
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    const Pose2 p = v < graph.vertex_estimates.size() ? graph.vertex_estimates[v] : Pose2();
    out << "VERTEX_SE2 " << graph.vertex_ids[v] << ' ' << p.x() << ' ' << p.y() << ' ' << p.theta() << '\n';
  }
  for (const auto& e : graph.edges) {
    const auto& m = e.measurement;
    out << "EDGE_SE2 " << graph.vertex_ids[static_cast<std::size_t>(e.from)] << ' '
        << graph.vertex_ids[static_cast<std::size_t>(e.to)] << ' ' << m.x() << ' ' << m.y() << ' ' << m.theta();
    for (double v : e.information) out << ' ' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_g2o_2d(const std::filesystem::path& path, const PoseGraph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write g2o file: " + path.string());
  write_g2o_2d(out, graph);
}

}  // namespace imot::bench
