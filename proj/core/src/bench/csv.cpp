#include "imot/bench/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace imot::bench {

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::Failed: return "failed";
    case TrialStatus::Crashed: return "crashed";
  }
  return "unknown";
}

const std::vector<std::string_view> kBenchColumns = {
    "problem",         "estimator",        "n",           "outlier_ratio", "trial",          "seed",
    "rotation_error_deg", "translation_error", "shape_error", "trajectory_ate", "inlier_precision",
    "inlier_recall",   "iterations",       "wall_time_s", "converged",     "status",         "message"};

const std::vector<std::string_view> kSummaryColumns = {
    "problem",          "estimator",           "outlier_ratio",        "trials",
    "failed",           "rotation_error_deg_mean", "rotation_error_deg_median", "translation_error_mean",
    "translation_error_median", "shape_error_mean", "shape_error_median",   "trajectory_ate_mean",
    "trajectory_ate_median", "inlier_precision_mean", "inlier_precision_median", "inlier_recall_mean",
    "inlier_recall_median", "iterations_mean",  "iterations_median",    "wall_time_s_mean",
    "wall_time_s_median"};

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void write_header(std::ostream& out, const std::vector<std::string_view>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << "\r\n";
}

MetricSummary summarize_metric(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return {mean, median_of(values)};
}

}  // namespace

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median_of: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<SummaryRow> summarize(std::span<const BenchRow> rows) {
  struct Accumulator {
    SummaryRow row;
    std::vector<double> rot, trans, shape, ate, prec, rec, iters, time;
  };
  std::vector<Accumulator> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Accumulator& a) {
      return a.row.problem == r.problem && a.row.estimator == r.estimator && a.row.outlier_ratio == r.outlier_ratio;
    });
    if (it == groups.end()) {
      groups.push_back({});
      it = std::prev(groups.end());
      it->row.problem = r.problem;
      it->row.estimator = r.estimator;
      it->row.outlier_ratio = r.outlier_ratio;
    }
    ++it->row.trials;
    if (r.status != TrialStatus::Ok) {
      ++it->row.failed;
      continue;
    }
    auto push = [](std::vector<double>& v, const std::optional<double>& x) {
      if (x) v.push_back(*x);
    };
    push(it->rot, r.rotation_error_deg);
    push(it->trans, r.translation_error);
    push(it->shape, r.shape_error);
    push(it->ate, r.trajectory_ate);
    push(it->prec, r.inlier_precision);
    push(it->rec, r.inlier_recall);
    it->iters.push_back(r.iterations);
    it->time.push_back(r.wall_time_s);
  }
  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    g.row.rotation_error_deg = summarize_metric(g.rot);
    g.row.translation_error = summarize_metric(g.trans);
    g.row.shape_error = summarize_metric(g.shape);
    g.row.trajectory_ate = summarize_metric(g.ate);
    g.row.inlier_precision = summarize_metric(g.prec);
    g.row.inlier_recall = summarize_metric(g.rec);
    g.row.iterations = summarize_metric(g.iters);
    g.row.wall_time_s = summarize_metric(g.time);
    out.push_back(std::move(g.row));
  }
  return out;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  write_header(out, kBenchColumns);
  for (const auto& r : rows) {
    out << csv_escape(r.problem) << ',' << csv_escape(r.estimator) << ',' << r.n << ','
        << format_number(r.outlier_ratio) << ',' << r.trial << ',' << r.seed << ','
        << format_optional(r.rotation_error_deg) << ',' << format_optional(r.translation_error) << ','
        << format_optional(r.shape_error) << ',' << format_optional(r.trajectory_ate) << ','
        << format_optional(r.inlier_precision) << ',' << format_optional(r.inlier_recall) << ',' << r.iterations
        << ',' << format_number(r.wall_time_s) << ',' << (r.converged ? "true" : "false") << ','
        << to_string(r.status) << ',' << csv_escape(r.message) << "\r\n";
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  write_header(out, kSummaryColumns);
  for (const auto& r : rows) {
    out << csv_escape(r.problem) << ',' << csv_escape(r.estimator) << ',' << format_number(r.outlier_ratio) << ','
        << r.trials << ',' << r.failed;
    for (const MetricSummary* m : {&r.rotation_error_deg, &r.translation_error, &r.shape_error, &r.trajectory_ate,
                                   &r.inlier_precision, &r.inlier_recall, &r.iterations, &r.wall_time_s}) {
      out << ',' << format_optional(m->mean) << ',' << format_optional(m->median);
    }
    out << "\r\n";
  }
}

void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_bench_csv(out, rows);
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_summary_csv(out, rows);
}

}  // namespace imot::bench
