#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "odf/random.hpp"

namespace odf {

struct Bernoulli {
  double p;
};

struct Gaussian {
  double mu;
  double sigma;
};

/// Finite bounded reward with strictly ascending support. Composite rewards
/// (e.g. a sum of bounded sub-scores) are represented by the distribution
/// they induce on the summed support.
struct Discrete {
  std::vector<double> support;
  std::vector<double> probs;
};

/// Mean and central cumulants up to order four.
struct CumulantSet {
  double mean = 0.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
};

/// Distribution of a verifiable reward for one prompt under a fixed policy.
/// Validated on construction and immutable afterwards.
class RewardDistribution {
 public:
  using Kind = std::variant<Bernoulli, Gaussian, Discrete>;

  static RewardDistribution bernoulli(double p);
  static RewardDistribution gaussian(double mu, double sigma);
  static RewardDistribution discrete(std::vector<double> support, std::vector<double> probs);
  /// Uniform over the given support.
  static RewardDistribution uniform(std::vector<double> support);

  const Kind& kind() const noexcept { return kind_; }

  /// True when the reward is almost surely constant.
  bool degenerate() const noexcept;

  /// True for Bernoulli and Discrete.
  bool bounded() const noexcept { return !std::holds_alternative<Gaussian>(kind_); }

 private:
  explicit RewardDistribution(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

double mean(const RewardDistribution& d);

CumulantSet cumulants(const RewardDistribution& d);

/// Central cumulants of a finite distribution from its centered raw moments.
/// Used for Discrete and as the cross-check for the Bernoulli closed form.
CumulantSet cumulants_by_moments(std::span<const double> support, std::span<const double> probs);

/// K_{r-mu}(t) = log E[exp(t (r - mu))]. Evaluated in max-shifted form.
/// Throws NumericError if the result is not finite.
double cgf_centered(const RewardDistribution& d, double t);

/// log E[exp(t r)], the uncentered CGF, via the same stabilized enumeration.
double cgf_raw(const RewardDistribution& d, double t);

/// n independent draws.
std::vector<double> sample(const RewardDistribution& d, RandomStream& rng, std::size_t n);

/// log(sum_i exp(x_i) * w_i) with weights w_i >= 0; zero-weight terms dropped.
double log_weighted_sum_exp(std::span<const double> exponents, std::span<const double> weights);

}  // namespace odf
