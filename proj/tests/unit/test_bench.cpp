#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "imot/bench/csv.hpp"
#include "imot/bench/g2o.hpp"
#include "imot/bench/sweep.hpp"
#include "imot/errors.hpp"

using namespace imot;
using namespace imot::bench;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

BenchRow row(std::string estimator, double ratio, int trial, double rot, TrialStatus status = TrialStatus::Ok) {
  BenchRow r;
  r.problem = "registration";
  r.estimator = std::move(estimator);
  r.n = 10;
  r.outlier_ratio = ratio;
  r.trial = trial;
  r.rotation_error_deg = rot;
  r.iterations = trial + 1;
  r.status = status;
  return r;
}

}  // namespace

TEST_CASE("CSV quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
  CHECK(csv_escape("") == "");
}

TEST_CASE("median") {
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(median_of({}), std::invalid_argument);
}

TEST_CASE("bench and summary tables") {
  std::vector<BenchRow> rows{row("imot", 0.5, 0, 1.0), row("imot", 0.5, 1, 3.0), row("imot", 0.5, 2, 99.0, TrialStatus::Failed),
                             row("ransac", 0.5, 0, 2.0), row("imot", 0.9, 0, 4.0)};
  rows[2].rotation_error_deg.reset();
  rows[2].message = "InsufficientInliers, at iteration 3";

  std::ostringstream out;
  write_bench_csv(out, rows);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 6);
  std::string header;
  for (std::size_t i = 0; i < kBenchColumns.size(); ++i) header += (i ? "," : "") + std::string(kBenchColumns[i]);
  CHECK(lines[0] == header);
  CHECK(out.str().find("\r\n") != std::string::npos);
  CHECK(lines[1].rfind("registration,imot,10,0.5,0,0,1,,,,,,1,0,false,ok,", 0) == 0);
  CHECK(lines[3].find(",failed,\"InsufficientInliers, at iteration 3\"") != std::string::npos);

  const auto summary = summarize(rows);
  REQUIRE(summary.size() == 3);
  CHECK(summary[0].estimator == "imot");
  CHECK(summary[0].outlier_ratio == 0.5);
  CHECK(summary[0].trials == 3);
  CHECK(summary[0].failed == 1);
  CHECK(*summary[0].rotation_error_deg.mean == doctest::Approx(2.0));
  CHECK(*summary[0].rotation_error_deg.median == doctest::Approx(2.0));
  CHECK_FALSE(summary[0].translation_error.mean);
  CHECK(summary[1].estimator == "ransac");
  CHECK(summary[2].outlier_ratio == 0.9);

  std::ostringstream sout;
  write_summary_csv(sout, summary);
  const auto slines = lines_of(sout.str());
  REQUIRE(slines.size() == 4);
  CHECK(slines[1].rfind("registration,imot,0.5,3,1,2,2,,,", 0) == 0);
}

TEST_CASE("g2o parsing") {
  SUBCASE("three-vertex chain") {
    std::istringstream in(
        "VERTEX_SE2 0 0 0 0\n"
        "VERTEX_SE2 1 1 0 0\n"
        "VERTEX_SE2 2 2 0 0\n"
        "EDGE_SE2 0 1 1 0 0 10 0 0 10 0 20\n"
        "EDGE_SE2 1 2 1 0 0 10 0 0 30 0 20\n");
    const auto g = parse_g2o_2d(in);
    CHECK(g.vertex_count() == 3);
    CHECK(g.odometry_edges().size() == 2);
    CHECK(g.loop_closure_edges().empty());
    CHECK(g.edges[0].translation_weight() == 10.0);
    CHECK(g.edges[1].translation_weight() == 20.0);
    CHECK(g.edges[1].rotation_weight() == 20.0);
  }

  SUBCASE("five vertices with one loop closure") {
    std::vector<std::string> warnings;
    std::istringstream in(
        "# hand-written square\n"
        "VERTEX_SE2 0 0 0 0\n"
        "VERTEX_SE2 1 1 0 1.5707963267948966\n"
        "VERTEX_SE2 2 1 1 3.141592653589793\n"
        "VERTEX_SE2 3 0 1 -1.5707963267948966\n"
        "VERTEX_SE2 4 0 0 0\n"
        "FIX 0\n"
        "EDGE_SE2 0 1 1 0 1.5707963267948966 1 0 0 1 0 1\n"
        "EDGE_SE2 1 2 1 0 1.5707963267948966 1 0 0 1 0 1\n"
        "EDGE_SE2 2 3 1 0 1.5707963267948966 1 0 0 1 0 1\n"
        "EDGE_SE2 3 4 1 0 1.5707963267948966 1 0 0 1 0 1\n"
        "EDGE_SE2 4 0 0 0 0 1 0 0 1 0 1\n");
    const auto g = parse_g2o_2d(in, &warnings);
    CHECK(g.vertex_count() == 5);
    CHECK(g.odometry_edges() == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(g.loop_closure_edges() == std::vector<std::size_t>{4});
    CHECK(warnings.size() == 1);
    CHECK(g.vertex_estimates[2].theta() == doctest::Approx(std::numbers::pi));
  }

  SUBCASE("malformed lines name the line") {
    std::istringstream in("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0\n");
    try {
      (void)parse_g2o_2d(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream junk("EDGE_SE2 0 1 a 0 0 1 0 0 1 0 1\n");
    CHECK_THROWS_AS(parse_g2o_2d(junk), ParseError);
  }

  SUBCASE("write then parse") {
    problems::PoseGraph g;
    g.vertex_ids = {0, 1, 2, 3};
    g.vertex_estimates = {Pose2(0.1, 0.0, 0.0), Pose2(1.0 / 3.0, 1.25, -0.5), Pose2(-2.0, 2.0, 1e-7),
                          Pose2(3.0, 3.0, 1.0)};
    g.edges.push_back(problems::PoseGraphEdge::make(0, 1, Pose2(0.2, 1.0 / 7.0, 0.3), 11.0, 13.0,
                                                    problems::EdgeKind::Odometry));
    g.edges.push_back(problems::PoseGraphEdge::make(1, 2, Pose2(-0.4, 0.9, -0.2), 2.0, 3.0,
                                                    problems::EdgeKind::Odometry));
    g.edges.push_back(problems::PoseGraphEdge::make(2, 3, Pose2(0.0, 1.0, 0.0), 1.0, 1.0,
                                                    problems::EdgeKind::Odometry));
    g.edges.push_back(problems::PoseGraphEdge::make(0, 3, Pose2(1.0, 2.0, 3.0), 5.0, 7.0,
                                                    problems::EdgeKind::LoopClosure));
    std::ostringstream out;
    write_g2o_2d(out, g);
    std::istringstream in(out.str());
    const auto back = parse_g2o_2d(in);
    CHECK(back.vertex_ids == g.vertex_ids);
    REQUIRE(back.edges.size() == g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      CHECK(back.edges[i].from == g.edges[i].from);
      CHECK(back.edges[i].to == g.edges[i].to);
      CHECK(back.edges[i].kind == g.edges[i].kind);
      CHECK(back.edges[i].information == g.edges[i].information);
      CHECK(back.edges[i].measurement.theta() == g.edges[i].measurement.theta());
      CHECK(back.edges[i].measurement.x() == g.edges[i].measurement.x());
      CHECK(back.edges[i].measurement.y() == g.edges[i].measurement.y());
    }
    for (std::size_t i = 0; i < g.vertex_estimates.size(); ++i) {
      CHECK(back.vertex_estimates[i].x() == g.vertex_estimates[i].x());
      CHECK(back.vertex_estimates[i].theta() == g.vertex_estimates[i].theta());
    }
  }
}

TEST_CASE("names") {
  for (auto kind : {ProblemKind::RotationAveraging, ProblemKind::RotationSearch, ProblemKind::Registration,
                    ProblemKind::Category, ProblemKind::Slam}) {
    CHECK(parse_problem(to_string(kind)) == kind);
  }
  for (auto kind : {EstimatorKind::Imot, EstimatorKind::ImotStar, EstimatorKind::GncTls, EstimatorKind::GncGm,
                    EstimatorKind::Adapt, EstimatorKind::Ransac}) {
    CHECK(parse_estimator(to_string(kind)) == kind);
  }
  CHECK_FALSE(parse_estimator("lmeds"));
  CHECK_FALSE(parse_problem("bundle"));
  CHECK_FALSE(supports(ProblemKind::Slam, EstimatorKind::Ransac));
  CHECK(supports(ProblemKind::Registration, EstimatorKind::Ransac));
}

TEST_CASE("trajectory error") {
  std::vector<Pose2> ref;
  for (int i = 0; i < 10; ++i) ref.emplace_back(0.1 * i, i * 1.0, std::sin(i));
  CHECK(absolute_trajectory_error(ref, ref) < 1e-12);

  // A rigid motion of the whole trajectory is aligned away.
  const Pose2 g(0.7, -3.0, 5.0);
  std::vector<Pose2> moved;
  for (const auto& p : ref) moved.push_back(g * p);
  CHECK(absolute_trajectory_error(moved, ref) < 1e-9);

  std::vector<Pose2> shifted = ref;
  shifted[0] = Pose2(shifted[0].theta(), shifted[0].x() + 1.0, shifted[0].y());
  const double ate = absolute_trajectory_error(shifted, ref);
  CHECK(ate > 0.0);
  CHECK(ate < 1.0 / std::sqrt(10.0) + 1e-12);
}

TEST_CASE("inlier scoring") {
  const std::vector<bool> mask{true, true, false, false, true};
  const std::vector<std::size_t> sel{0, 2};
  auto s = score_inliers(sel, mask);
  CHECK(*s.precision == 0.5);
  CHECK(*s.recall == doctest::Approx(1.0 / 3.0));
  s = score_inliers(std::vector<std::size_t>{}, mask);
  CHECK_FALSE(s.precision);
  CHECK(*s.recall == 0.0);
  const std::vector<std::size_t> scope{2, 3, 4};
  s = score_inliers(std::vector<std::size_t>{0, 1, 4}, mask, scope);
  CHECK(*s.precision == 1.0);
  CHECK(*s.recall == 1.0);
  s = score_inliers(sel, std::vector<bool>(5, false));
  CHECK_FALSE(s.recall);
}

TEST_CASE("Monte Carlo sweep") {
  SweepConfig config = SweepConfig::defaults_for(ProblemKind::Registration);
  config.n = 60;
  config.ratios = {0.0, 0.5};
  config.trials = 3;
  config.seed = 5;
  config.estimators = {EstimatorKind::Imot, EstimatorKind::Ransac, EstimatorKind::GncTls};

  const auto rows = run_monte_carlo(config);
  REQUIRE(rows.size() == 18);
  CHECK(rows[0].estimator == "imot");
  CHECK(rows[0].outlier_ratio == 0.0);
  CHECK(rows[5].estimator == "imot");
  CHECK(rows[5].outlier_ratio == 0.5);
  CHECK(rows[5].trial == 2);
  CHECK(rows[6].estimator == "ransac");
  for (const auto& r : rows) {
    CHECK(r.status == TrialStatus::Ok);
    CHECK(r.seed == trial_seed(5, r.outlier_ratio, r.trial));
    CHECK(*r.rotation_error_deg >= 0.0);
    CHECK(*r.inlier_precision <= 1.0);
    CHECK(r.wall_time_s >= 0.0);
  }
  // The same instance is shared by every estimator of a trial.
  CHECK(rows[0].seed == rows[6].seed);

  config.threads = 4;
  const auto again = run_monte_carlo(config);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].estimator == rows[i].estimator);
    CHECK(again[i].rotation_error_deg == rows[i].rotation_error_deg);
    CHECK(again[i].inlier_recall == rows[i].inlier_recall);
    CHECK(again[i].iterations == rows[i].iterations);
  }

  CHECK(trial_seed(5, 0.5, 0) != trial_seed(5, 0.5, 1));
  CHECK(trial_seed(5, 0.5, 0) != trial_seed(5, 0.6, 0));

  config.estimators = {EstimatorKind::Ransac};
  config.problem = ProblemKind::Slam;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
