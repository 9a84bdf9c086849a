#pragma once

#include <span>
#include <utility>
#include <vector>

#include "odf/reward_models.hpp"

namespace odf {

/// KL-regularization strength. Always strictly positive.
class Temperature {
 public:
  explicit Temperature(double beta);
  double beta() const noexcept { return beta_; }
  double inverse() const noexcept { return 1.0 / beta_; }

 private:
  double beta_;
};

struct LearnabilityReport {
  double exact_kl = 0.0;
  double variance_bound = 0.0;
  double residual = 0.0;  // exact_kl - variance_bound
  double soft_value = 0.0;
  CumulantSet cumulants;
};

/// V* = beta * log E[exp(r / beta)].
double soft_value(const RewardDistribution& d, Temperature temp);

/// Reverse KL between the initial policy and its Boltzmann-tilted optimum,
/// evaluated at the reward level as the centered CGF at 1/beta.
double exact_reverse_kl(const RewardDistribution& d, Temperature temp);

/// Same quantity through the soft value: V*/beta - mu/beta. Kept as an
/// independent evaluation path for cross-checking `exact_reverse_kl`.
double reverse_kl_via_soft_value(const RewardDistribution& d, Temperature temp);

/// kappa2 / (2 beta^2).
double variance_lower_bound(const RewardDistribution& d, Temperature temp);

LearnabilityReport learnability_report(const RewardDistribution& d, Temperature temp);

struct ResidualPoint {
  double beta;
  double scaled_residual;  // (exact_kl - variance_bound) * beta^3
};

inline const std::vector<double> kDefaultResidualBetas{4.0, 8.0, 16.0, 32.0, 64.0};

/// residual * beta^3 for each beta; tends to kappa3 / 6 as beta grows.
/// Requires at least three ascending betas, each >= 1.
std::vector<ResidualPoint> bound_residual_scan(const RewardDistribution& d,
                                               std::span<const double> betas);

struct KlPoint {
  double p;
  double kl;
};

/// Exact Bernoulli reverse KL at each pass rate in `grid`.
std::vector<KlPoint> kl_profile(Temperature temp, std::span<const double> grid);

struct MonteCarloEstimate {
  double value;
  double standard_error;  // delta-method, from the same sample
};

/// log(mean(exp((r_i - rbar) / beta))). Throws on fewer than two samples.
MonteCarloEstimate monte_carlo_kl_estimate(std::span<const double> samples, Temperature temp);

}  // namespace odf
