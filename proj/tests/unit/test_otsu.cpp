#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "imot/otsu.hpp"
#include "oracles.hpp"

using namespace imot;

namespace {

/// Residuals whose histogram (top value 1.0, L intervals) has the given counts.
std::vector<double> residuals_for_counts(const std::vector<std::size_t>& counts) {
  const double width = 1.0 / static_cast<double>(counts.size());
  std::vector<double> out;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    for (std::size_t c = 0; c < counts[l]; ++c) out.push_back((static_cast<double>(l) + 0.5) * width);
  }
  out.push_back(1.0);
  return out;
}

}  // namespace

TEST_CASE("build_histogram binning") {
  const std::vector<double> same(10, 1.0);
  const auto h = build_histogram(same, 200);
  CHECK(h.upper_bound == 1.0);
  CHECK(h.counts[199] == 10);
  CHECK(h.total() == 10);

  const std::vector<double> quarters{0.25, 0.5, 0.75, 1.0};
  const auto q = build_histogram(quarters, 4);
  CHECK(q.interval_width == 0.25);
  CHECK(q.counts == std::vector<std::size_t>{1, 1, 1, 1});

  const std::vector<double> with_zero{0.0, 0.0, 2.0};
  const auto z = build_histogram(with_zero, 4);
  CHECK(z.counts == std::vector<std::size_t>{2, 0, 0, 1});

  CHECK(kDefaultIntervalCount == 200);
  CHECK(build_histogram(std::vector<double>{0.0, 0.0}).degenerate());
}

TEST_CASE("build_histogram rejects bad input") {
  CHECK_THROWS_AS(build_histogram(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(build_histogram(std::vector<double>{1.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(build_histogram(std::vector<double>{std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(build_histogram(std::vector<double>{1.0}, 0), std::invalid_argument);
}

TEST_CASE("interval_of agrees with threshold comparisons") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3.7);
  std::vector<double> r(2000);
  for (auto& x : r) x = u(rng);
  const auto h = build_histogram(r, 200);
  for (double x : r) {
    const int l = h.interval_of(x);
    CHECK(l >= 1);
    CHECK(l <= 200);
    if (l < 200) CHECK(x <= h.threshold_at(l));
    if (l > 1) CHECK(x > h.threshold_at(l - 1));
  }
}

TEST_CASE("two clusters split exactly") {
  std::vector<std::size_t> counts(200, 0);
  counts[9] = 50;
  counts[189] = 50;
  std::vector<double> r;
  for (int i = 0; i < 50; ++i) r.push_back(9.5 / 200.0);
  for (int i = 0; i < 50; ++i) r.push_back(189.5 / 200.0);
  r.back() = 1.0;
  counts[189] = 49;
  counts[199] = 1;
  const auto h = build_histogram(r, 200);
  CHECK(h.counts == counts);

  const auto split = otsu_threshold(h, 200, r.size());
  REQUIRE(split);
  CHECK(split->split_index >= 10);
  CHECK(split->split_index <= 189);
  CHECK(split->split_index == *oracle::otsu_argmax(h.counts, 200));

  const auto result = multilayer_threshold(r, 200, 1);
  CHECK(result.lower_group.size() == 50);
  for (std::size_t i : result.lower_group) CHECK(i < 50);
}

TEST_CASE("single occupied interval gives no split") {
  const auto h = build_histogram(std::vector<double>(7, 0.4), 200);
  CHECK_FALSE(otsu_threshold(h, 200, 7));
  const auto result = multilayer_threshold(std::vector<double>(7, 0.4), 200, 3);
  CHECK(result.layers.empty());
  CHECK(result.lower_group.size() == 7);
}

TEST_CASE("uniform counts split in the middle") {
  std::vector<std::size_t> counts(200, 0);
  for (int l = 0; l < 100; ++l) counts[l] = 5;
  const auto r = residuals_for_counts(counts);
  const auto h = build_histogram(r, 200);
  const auto split = otsu_threshold(h, 100, h.cumulative_count(100));
  REQUIRE(split);
  CHECK(std::abs(split->split_index - 50) <= 1);
  CHECK(split->split_index == *oracle::otsu_argmax(h.counts, 100));
}

TEST_CASE("otsu_threshold validates member_count") {
  const auto h = build_histogram(std::vector<double>{0.1, 0.5, 1.0}, 10);
  CHECK_THROWS_AS(otsu_threshold(h, 10, 2), std::invalid_argument);
  CHECK_THROWS_AS(otsu_threshold(h, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(otsu_threshold(h, 11, 3), std::invalid_argument);
}

TEST_CASE("between_class_variance matches the direct definition") {
  std::mt19937_64 rng(9);
  std::gamma_distribution<double> g(2.0, 1.0);
  std::vector<double> r(700);
  for (auto& x : r) x = g(rng);
  const auto h = build_histogram(r, 200);
  for (int upper : {200, 120, 40}) {
    const auto eta = between_class_variance(h, upper, h.cumulative_count(upper));
    const auto direct = oracle::eta_direct(h.counts, upper);
    for (int k = 0; k < upper; ++k) {
      if (direct[k] < 0.0) {
        CHECK(std::isnan(eta[k]));
      } else {
        CHECK(eta[k] == doctest::Approx(direct[k]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("three clusters with two layers keep the smallest") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> jitter(0.0, 0.002);
  std::vector<double> r;
  for (int i = 0; i < 34; ++i) r.push_back(std::abs(0.01 + jitter(rng)));
  for (int i = 0; i < 33; ++i) r.push_back(0.5 + jitter(rng));
  for (int i = 0; i < 33; ++i) r.push_back(1.0 + jitter(rng));
  const auto result = multilayer_threshold(r, 200, 2);
  REQUIRE(result.lower_group.size() == 34);
  for (std::size_t i : result.lower_group) CHECK(i < 34);
  CHECK(result.lower_group == oracle::multipass_lower_group(r, 200, 2));
}

TEST_CASE("single layer equals otsu_threshold over the full range") {
  std::mt19937_64 rng(23);
  std::exponential_distribution<double> e(3.0);
  std::vector<double> r(400);
  for (auto& x : r) x = e(rng);
  const auto h = build_histogram(r, 200);
  const auto split = otsu_threshold(h, 200, r.size());
  const auto result = multilayer_threshold(r, 200, 1);
  REQUIRE(split);
  CHECK(result.split_index == split->split_index);
  CHECK(result.threshold == split->threshold);
}

TEST_CASE("layers are monotone and partition the previous group") {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> ln(0.0, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> r(300);
    for (auto& x : r) x = ln(rng);
    const auto result = multilayer_threshold(r, 200, 4);
    double previous = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> group(r.size());
    std::iota(group.begin(), group.end(), std::size_t{0});
    for (const auto& layer : result.layers) {
      CHECK(layer.threshold <= previous);
      CHECK(std::includes(group.begin(), group.end(), layer.lower_group.begin(), layer.lower_group.end()));
      for (std::size_t i : group) {
        const bool lower = std::binary_search(layer.lower_group.begin(), layer.lower_group.end(), i);
        CHECK(lower == (r[i] <= layer.threshold));
      }
      previous = layer.threshold;
      group = layer.lower_group;
    }
    std::vector<std::size_t> all = result.lower_group;
    all.insert(all.end(), result.upper_group.begin(), result.upper_group.end());
    std::sort(all.begin(), all.end());
    CHECK(all.size() == r.size());
    CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
}

TEST_CASE("scaling residuals scales thresholds and keeps groups") {
  std::mt19937_64 rng(37);
  std::gamma_distribution<double> g(1.5, 2.0);
  std::vector<double> r(500);
  for (auto& x : r) x = g(rng);
  const auto base = multilayer_threshold(r, 200, 3);
  for (double s : {0.125, 0.5, 4.0, 1024.0}) {
    std::vector<double> scaled = r;
    for (auto& x : scaled) x *= s;
    const auto result = multilayer_threshold(scaled, 200, 3);
    REQUIRE(result.layers.size() == base.layers.size());
    for (std::size_t j = 0; j < base.layers.size(); ++j) {
      CHECK(result.layers[j].threshold == doctest::Approx(s * base.layers[j].threshold).epsilon(1e-12));
      CHECK(result.layers[j].lower_group == base.layers[j].lower_group);
    }
  }
}

TEST_CASE("degenerate residuals") {
  const auto result = multilayer_threshold(std::vector<double>(5, 0.0), 200, 2);
  CHECK(result.degenerate);
  CHECK(result.threshold == 0.0);
  CHECK(result.lower_group.size() == 5);
  CHECK_THROWS_AS(multilayer_threshold(std::vector<double>{}, 200, 2), std::invalid_argument);
}

TEST_CASE("recommended layer counts") {
  CHECK(recommended_layer_count(100) == 2);
  CHECK(recommended_layer_count(199) == 2);
  CHECK(recommended_layer_count(200) == 3);
  CHECK(recommended_layer_count(1000) == 3);
  CHECK(kSlamLayerCount == 4);
}
