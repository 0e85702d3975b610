#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "imot/geometry.hpp"

namespace imot::problems {

/// Unit-vector correspondence p ↔ q with q ≈ R p.
struct VectorCorrespondence {
  Vec3 p;
  Vec3 q;
};

double rs_residual(const VectorCorrespondence& m, const Rotation3& rotation);

/// Weighted Wahba solution R = proj_SO(3)(Σ w_i q_i p_iᵀ).
/// Throws DegenerateInput for fewer than two non-collinear weighted vectors.
Rotation3 wahba_svd(std::span<const VectorCorrespondence> data, std::span<const std::size_t> subset,
                    std::span<const double> weights = {});

class RotationSearch {
 public:
  using Solution = Rotation3;

  explicit RotationSearch(std::span<const VectorCorrespondence> data) : data_(data) {}

  std::size_t measurement_count() const { return data_.size(); }
  double residual(std::size_t i, const Rotation3& r) const { return rs_residual(data_[i], r); }
  Rotation3 solve(std::span<const std::size_t> subset, std::span<const double> weights) const {
    return wahba_svd(data_, subset, weights);
  }
  std::size_t min_measurements() const { return 2; }
  std::optional<std::vector<std::size_t>> seed_set() const { return std::nullopt; }

  std::size_t minimal_size() const { return 2; }
  Rotation3 solve_minimal(std::span<const std::size_t> sample) const { return wahba_svd(data_, sample); }

 private:
  std::span<const VectorCorrespondence> data_;
};

}  // namespace imot::problems
