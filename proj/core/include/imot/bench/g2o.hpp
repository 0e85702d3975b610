#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "imot/problems/pose_graph.hpp"

namespace imot::bench {

/// Reads the 2D subset of the g2o text format:
///   VERTEX_SE2 id x y theta
///   EDGE_SE2 i j dx dy dtheta i11 i12 i13 i22 i23 i33
/// Edges with |i − j| = 1 are odometry, the rest loop closures. Other tags are
/// skipped and reported in `warnings` (if given). Malformed lines throw
/// ParseError with the line number.
problems::PoseGraph parse_g2o_2d(std::istream& in, std::vector<std::string>* warnings = nullptr);
problems::PoseGraph parse_g2o_2d(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Writes vertices (vertex_estimates, or the origin when absent) then edges,
/// with enough digits to round-trip doubles exactly.
void write_g2o_2d(std::ostream& out, const problems::PoseGraph& graph);
void write_g2o_2d(const std::filesystem::path& path, const problems::PoseGraph& graph);

}  // namespace imot::bench
