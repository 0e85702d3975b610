#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace imot::problems {

/// Per-subset-entry weight lookup; an empty weight span means all ones.
class WeightView {
 public:
  WeightView(std::span<const std::size_t> subset, std::span<const double> weights)
      : weights_(weights), size_(subset.size()) {
    if (!weights_.empty() && weights_.size() != size_) {
      throw std::invalid_argument("weights must be empty or parallel to the subset");
    }
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("weights must be non-negative");
    }
  }

  double operator[](std::size_t j) const { return weights_.empty() ? 1.0 : weights_[j]; }

  std::size_t active_count() const {
    if (weights_.empty()) return size_;
    std::size_t n = 0;
    for (double w : weights_) n += w > 0.0 ? 1 : 0;
    return n;
  }

 private:
  std::span<const double> weights_;
  std::size_t size_;
};

}  // namespace imot::problems
