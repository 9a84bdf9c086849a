#include "odf/learnability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "odf/errors.hpp"

namespace odf {

Temperature::Temperature(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("Temperature: beta must be positive and finite, got " +
                                std::to_string(beta));
  }
}

double soft_value(const RewardDistribution& d, Temperature temp) {
  const double v = temp.beta() * cgf_raw(d, temp.inverse());
  if (!std::isfinite(v)) throw NumericError("soft_value: result is not finite");
  return v;
}

double exact_reverse_kl(const RewardDistribution& d, Temperature temp) {
  return cgf_centered(d, temp.inverse());
}

double reverse_kl_via_soft_value(const RewardDistribution& d, Temperature temp) {
  if (d.degenerate()) return 0.0;
  return cgf_raw(d, temp.inverse()) - mean(d) * temp.inverse();
}

double variance_lower_bound(const RewardDistribution& d, Temperature temp) {
  const double b = temp.beta();
  return cumulants(d).kappa2 / (2.0 * b * b);
}

LearnabilityReport learnability_report(const RewardDistribution& d, Temperature temp) {
  LearnabilityReport r;
  r.exact_kl = exact_reverse_kl(d, temp);
  r.variance_bound = variance_lower_bound(d, temp);
  r.residual = r.exact_kl - r.variance_bound;
  r.soft_value = soft_value(d, temp);
  r.cumulants = cumulants(d);
  return r;
}

std::vector<ResidualPoint> bound_residual_scan(const RewardDistribution& d,
                                               std::span<const double> betas) {
  if (betas.size() < 3) throw std::invalid_argument("bound_residual_scan: need at least 3 betas");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] >= 1.0)) throw std::invalid_argument("bound_residual_scan: betas must be >= 1");
    if (i > 0 && !(betas[i] > betas[i - 1])) {
      throw std::invalid_argument("bound_residual_scan: betas must be ascending");
    }
  }
  std::vector<ResidualPoint> out;
  out.reserve(betas.size());
  for (double b : betas) {
    const Temperature temp(b);
    const double residual = exact_reverse_kl(d, temp) - variance_lower_bound(d, temp);
    out.push_back({b, residual * b * b * b});
  }
  return out;
}

std::vector<KlPoint> kl_profile(Temperature temp, std::span<const double> grid) {
  std::vector<KlPoint> out;
  out.reserve(grid.size());
  for (double p : grid) out.push_back({p, exact_reverse_kl(RewardDistribution::bernoulli(p), temp)});
  return out;
}

MonteCarloEstimate monte_carlo_kl_estimate(std::span<const double> samples, Temperature temp) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("monte_carlo_kl_estimate: need at least 2 samples");
  const double t = temp.inverse();
  double rbar = 0.0;
  for (double r : samples) rbar += r;
  rbar /= static_cast<double>(n);

  double shift = -INFINITY;
  for (double r : samples) shift = std::max(shift, t * (r - rbar));
  double sum = 0.0;
  for (double r : samples) sum += std::exp(t * (r - rbar) - shift);
  const double mean_w = sum / static_cast<double>(n);
  const double value = shift + std::log(mean_w);
  if (!std::isfinite(value)) throw NumericError("monte_carlo_kl_estimate: result is not finite");

  // Influence of one draw on log E[e^{t r}] - t E[r]: w_i / E[w] - t r_i.
  double m = 0.0, m2 = 0.0;
  for (double r : samples) {
    const double y = std::exp(t * (r - rbar) - shift) / mean_w - t * (r - rbar);
    m += y;
    m2 += y * y;
  }
  m /= static_cast<double>(n);
  const double var = (m2 / static_cast<double>(n) - m * m) * static_cast<double>(n) /
                     static_cast<double>(n - 1);
  return {value, std::sqrt(std::max(var, 0.0) / static_cast<double>(n))};
}

}  // namespace odf
