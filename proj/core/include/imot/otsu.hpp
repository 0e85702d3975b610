#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace imot {

inline constexpr int kDefaultIntervalCount = 200;

/// Fixed-width histogram of non-negative residuals over (0, upper_bound].
///
/// Interval l (1-based) covers ((l-1)·width, l·width]. A residual of exactly
/// zero is counted in interval 1, and anything above interval_count·width
/// (rounding at the top edge) is clamped into the last interval.
struct ResidualHistogram {
  int interval_count = 0;
  double interval_width = 0.0;
  double upper_bound = 0.0;
  std::vector<std::size_t> counts;  // counts[l - 1] = n_l

  /// All residuals were zero; no split is meaningful.
  bool degenerate() const { return upper_bound == 0.0; }

  /// 1-based interval index of `residual`. Consistent with threshold tests:
  /// interval_of(r) <= k  <=>  r <= k * interval_width  (for k < interval_count).
  int interval_of(double residual) const;

  double threshold_at(int index) const { return static_cast<double>(index) * interval_width; }

  std::size_t total() const;
  /// Σ n_l for l in [1, upper_index].
  std::size_t cumulative_count(int upper_index) const;
};

/// Throws std::invalid_argument on empty input, non-finite or negative residuals,
/// or interval_count < 1.
ResidualHistogram build_histogram(std::span<const double> residuals,
                                  int interval_count = kDefaultIntervalCount);

struct OtsuSplit {
  int split_index = 0;    // k̂
  double threshold = 0;   // T̂ = k̂ · ΔH
};

/// Between-class variance η_k for k = 1..search_upper_index, with probabilities
/// renormalized by `member_count`. Entries where P_k ∈ {0, 1} hold NaN.
std::vector<double> between_class_variance(const ResidualHistogram& hist, int search_upper_index,
                                           std::size_t member_count);

/// Otsu split restricted to intervals [1, search_upper_index].
///
/// `member_count` must equal the number of residuals in that range. Returns
/// nullopt when fewer than two intervals in range are occupied. Ties resolve
/// to the smallest k.
std::optional<OtsuSplit> otsu_threshold(const ResidualHistogram& hist, int search_upper_index,
                                        std::size_t member_count);

struct ThresholdLayer {
  int split_index = 0;
  double threshold = 0.0;
  std::vector<std::size_t> lower_group;  // indices with residual <= threshold
};

struct ThresholdResult {
  double threshold = 0.0;
  int split_index = 0;
  double interval_width = 0.0;
  std::vector<std::size_t> lower_group;
  std::vector<std::size_t> upper_group;
  /// One entry per layer that actually split; may be shorter than requested.
  std::vector<ThresholdLayer> layers;
  /// All residuals were zero. threshold = 0 and every index is in lower_group.
  bool degenerate = false;
};

/// Multi-layered Otsu thresholding. The histogram is built once over all
/// residuals; layer j re-runs Otsu on the intervals at or below the previous
/// layer's split. Stops early (keeping the previous layer) when a layer finds
/// no split. If the very first layer cannot split, the result keeps every
/// index with threshold = upper bound.
ThresholdResult multilayer_threshold(std::span<const double> residuals, int interval_count,
                                     int layer_count);

/// Recommended layer count: 2 for N < 200, otherwise 3.
int recommended_layer_count(std::size_t measurement_count);
inline constexpr int kSlamLayerCount = 4;

}  // namespace imot
