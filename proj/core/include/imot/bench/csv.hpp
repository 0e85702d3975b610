#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace imot::bench {

enum class TrialStatus { Ok, Failed, Crashed };

std::string_view to_string(TrialStatus status);

/// One (estimator, outlier ratio, trial) outcome. Errors are in degrees
/// (rotation), metres (translation, trajectory) and relative norm (shape).
struct BenchRow {
  std::string problem;
  std::string estimator;
  std::size_t n = 0;
  double outlier_ratio = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> rotation_error_deg;
  std::optional<double> translation_error;
  std::optional<double> shape_error;
  std::optional<double> trajectory_ate;
  std::optional<double> inlier_precision;
  std::optional<double> inlier_recall;
  int iterations = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  TrialStatus status = TrialStatus::Ok;
  std::string message;
};

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> median;
};

struct SummaryRow {
  std::string problem;
  std::string estimator;
  double outlier_ratio = 0.0;
  std::size_t trials = 0;
  std::size_t failed = 0;
  MetricSummary rotation_error_deg;
  MetricSummary translation_error;
  MetricSummary shape_error;
  MetricSummary trajectory_ate;
  MetricSummary inlier_precision;
  MetricSummary inlier_recall;
  MetricSummary iterations;
  MetricSummary wall_time_s;
};

/// Groups rows by (problem, estimator, ratio) in first-seen order. Failed
/// trials count toward `failed` but not toward the metric statistics.
std::vector<SummaryRow> summarize(std::span<const BenchRow> rows);

/// RFC-4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in quotes with embedded quotes doubled.
std::string csv_escape(std::string_view field);

extern const std::vector<std::string_view> kBenchColumns;
extern const std::vector<std::string_view> kSummaryColumns;

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);

double median_of(std::vector<double> values);

}  // namespace imot::bench
