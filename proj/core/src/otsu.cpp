#include "imot/otsu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace imot {

int ResidualHistogram::interval_of(double residual) const {
  if (degenerate()) return 1;
  int index = static_cast<int>(std::ceil(residual / interval_width));
  // Make the index agree with the comparison r <= k·ΔH as evaluated in
  // floating point, so grouping by threshold and by interval never disagree.
  while (index > 1 && residual <= threshold_at(index - 1)) --index;
  while (residual > threshold_at(index) && index < interval_count) ++index;
  return std::clamp(index, 1, interval_count);
}

std::size_t ResidualHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ResidualHistogram::cumulative_count(int upper_index) const {
  const int upper = std::clamp(upper_index, 0, interval_count);
  return std::accumulate(counts.begin(), counts.begin() + upper, std::size_t{0});
}

ResidualHistogram build_histogram(std::span<const double> residuals, int interval_count) {
  if (residuals.empty()) throw std::invalid_argument("build_histogram: no residuals");
  if (interval_count < 1) throw std::invalid_argument("build_histogram: interval_count < 1");

  double upper = 0.0;
  for (double r : residuals) {
    if (!std::isfinite(r) || r < 0.0) {
      throw std::invalid_argument("build_histogram: residuals must be finite and non-negative");
    }
    upper = std::max(upper, r);
  }

  ResidualHistogram hist;
  hist.interval_count = interval_count;
  hist.upper_bound = upper;
  hist.interval_width = upper / interval_count;
  hist.counts.assign(static_cast<std::size_t>(interval_count), 0);
  if (hist.degenerate()) {
    hist.counts[0] = residuals.size();
    return hist;
  }
  for (double r : residuals) ++hist.counts[static_cast<std::size_t>(hist.interval_of(r) - 1)];
  return hist;
}

namespace {

void check_range(const ResidualHistogram& hist, int search_upper_index, std::size_t member_count) {
  if (search_upper_index < 1 || search_upper_index > hist.interval_count) {
    throw std::invalid_argument("otsu_threshold: search_upper_index out of [1, L]");
  }
  if (member_count == 0 || member_count != hist.cumulative_count(search_upper_index)) {
    throw std::invalid_argument("otsu_threshold: member_count does not match histogram range");
  }
}

}  // namespace

std::vector<double> between_class_variance(const ResidualHistogram& hist, int search_upper_index,
                                           std::size_t member_count) {
  check_range(hist, search_upper_index, member_count);
  const auto members = static_cast<double>(member_count);

  double mean = 0.0;
  for (int l = 1; l <= search_upper_index; ++l) {
    mean += l * (static_cast<double>(hist.counts[l - 1]) / members);
  }

  std::vector<double> eta(static_cast<std::size_t>(search_upper_index),
                          std::numeric_limits<double>::quiet_NaN());
  double prob = 0.0;
  double partial_mean = 0.0;
  std::size_t seen = 0;
  for (int k = 1; k <= search_upper_index; ++k) {
    const double p = static_cast<double>(hist.counts[k - 1]) / members;
    prob += p;
    partial_mean += k * p;
    seen += hist.counts[k - 1];
    // P_k = 0 or 1, decided on integer counts so rounding cannot sneak past.
    if (seen == 0 || seen == member_count) continue;
    const double gap = mean * prob - partial_mean;
    eta[k - 1] = gap * gap / (prob * (1.0 - prob));
  }
  return eta;
}

std::optional<OtsuSplit> otsu_threshold(const ResidualHistogram& hist, int search_upper_index,
                                        std::size_t member_count) {
  const std::vector<double> eta = between_class_variance(hist, search_upper_index, member_count);
  int best = 0;
  double best_eta = -1.0;
  for (int k = 1; k <= search_upper_index; ++k) {
    const double value = eta[k - 1];
    if (std::isnan(value)) continue;
    if (value > best_eta) {
      best_eta = value;
      best = k;
    }
  }
  if (best == 0) return std::nullopt;
  return OtsuSplit{best, hist.threshold_at(best)};
}

ThresholdResult multilayer_threshold(std::span<const double> residuals, int interval_count,
                                     int layer_count) {
  if (residuals.empty()) throw std::invalid_argument("multilayer_threshold: no residuals");
  if (layer_count < 1) throw std::invalid_argument("multilayer_threshold: layer_count < 1");

  const ResidualHistogram hist = build_histogram(residuals, interval_count);

  ThresholdResult result;
  result.interval_width = hist.interval_width;
  std::vector<std::size_t> all(residuals.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  if (hist.degenerate()) {
    result.degenerate = true;
    result.lower_group = std::move(all);
    return result;
  }

  int upper_index = hist.interval_count;
  std::size_t members = residuals.size();
  for (int layer = 1; layer <= layer_count; ++layer) {
    const auto split = otsu_threshold(hist, upper_index, members);
    if (!split) break;
    ThresholdLayer current{split->split_index, split->threshold, {}};
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      if (residuals[i] <= current.threshold) current.lower_group.push_back(i);
    }
    upper_index = current.split_index;
    members = current.lower_group.size();
    result.layers.push_back(std::move(current));
  }

  if (result.layers.empty()) {
    result.split_index = hist.interval_count;
    result.threshold = hist.upper_bound;
    result.lower_group = std::move(all);
    return result;
  }

  const ThresholdLayer& last = result.layers.back();
  result.split_index = last.split_index;
  result.threshold = last.threshold;
  result.lower_group = last.lower_group;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (cursor < result.lower_group.size() && result.lower_group[cursor] == i) {
      ++cursor;
    } else {
      result.upper_group.push_back(i);
    }
  }
  return result;
}

int recommended_layer_count(std::size_t measurement_count) {
  return measurement_count < 200 ? 2 : 3;
}

}  // namespace imot
