#include "imot/baselines.hpp"

#include <cmath>
#include <limits>

namespace imot::baselines {

void GncConfig::validate() const {
  if (!(noise_bound > 0.0)) throw std::invalid_argument("GncConfig: noise bound must be > 0");
  if (!(mu_factor > 1.0)) throw std::invalid_argument("GncConfig: mu_factor must be > 1");
  if (max_iterations < 1) throw std::invalid_argument("GncConfig: max_iterations must be >= 1");
}

void AdaptConfig::validate() const {
  if (!(noise_bound > 0.0)) throw std::invalid_argument("AdaptConfig: noise bound must be > 0");
  if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("AdaptConfig: decay must be in (0, 1)");
  if (max_iterations < 1) throw std::invalid_argument("AdaptConfig: max_iterations must be >= 1");
}

void RansacConfig::validate() const {
  if (!(noise_bound > 0.0)) throw std::invalid_argument("RansacConfig: noise bound must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("RansacConfig: max_iterations must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("RansacConfig: confidence must be in (0, 1)");
  }
}

double tls_weight(double r2, double eps2, double mu) {
  if (r2 <= mu / (mu + 1.0) * eps2) return 1.0;
  if (r2 >= (mu + 1.0) / mu * eps2) return 0.0;
  const double w = std::sqrt(eps2 * mu * (mu + 1.0) / r2) - mu;
  return std::clamp(w, 0.0, 1.0);
}

double gm_weight(double r2, double eps2, double mu) {
  const double ratio = mu * eps2 / (r2 + mu * eps2);
  return ratio * ratio;
}

double tls_initial_mu(double max_r2, double eps2) {
  const double denom = 2.0 * max_r2 - eps2;
  return denom > 0.0 ? eps2 / denom : 0.0;
}

double gm_initial_mu(double max_r2, double eps2) { return std::max(1.0, 2.0 * max_r2 / eps2); }

std::size_t ransac_required_iterations(double inlier_fraction, std::size_t sample_size, double confidence) {
  if (inlier_fraction <= 0.0) return std::numeric_limits<std::size_t>::max();
  const double all_inlier = std::pow(inlier_fraction, static_cast<double>(sample_size));
  if (all_inlier >= 1.0) return 1;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - all_inlier);
  if (!std::isfinite(k) || k > 1e12) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::ceil(std::max(k, 1.0)));
}

}  // namespace imot::baselines
