#include "odf/reward_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "odf/errors.hpp"

namespace odf {
namespace {

constexpr double kProbSumTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string(what) + ": result is not finite");
  }
  return value;
}

}  // namespace

RewardDistribution RewardDistribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("Bernoulli: p must lie in [0, 1], got " + std::to_string(p));
  }
  return RewardDistribution(Bernoulli{p});
}

RewardDistribution RewardDistribution::gaussian(double mu, double sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0) {
    throw std::invalid_argument("Gaussian: need finite mu and sigma >= 0");
  }
  return RewardDistribution(Gaussian{mu, sigma});
}

RewardDistribution RewardDistribution::discrete(std::vector<double> support,
                                                std::vector<double> probs) {
  if (support.empty() || support.size() != probs.size()) {
    throw std::invalid_argument("Discrete: support and probs must be nonempty and equal length");
  }
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!std::isfinite(support[i])) throw std::invalid_argument("Discrete: support must be finite");
    if (i > 0 && !(support[i] > support[i - 1])) {
      throw std::invalid_argument("Discrete: support must be strictly ascending");
    }
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i])) {
      throw std::invalid_argument("Discrete: probabilities must be nonnegative");
    }
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    throw std::invalid_argument("Discrete: probabilities must sum to 1");
  }
  return RewardDistribution(Discrete{std::move(support), std::move(probs)});
}

RewardDistribution RewardDistribution::uniform(std::vector<double> support) {
  const std::size_t n = support.size();
  if (n == 0) throw std::invalid_argument("Discrete: empty support");
  std::vector<double> probs(n, 1.0 / static_cast<double>(n));
  // Absorb the rounding of 1/n so the weights sum to one as closely as possible.
  probs.back() = 1.0 - std::accumulate(probs.begin(), probs.end() - 1, 0.0);
  return discrete(std::move(support), std::move(probs));
}

bool RewardDistribution::degenerate() const noexcept {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) { return b.p == 0.0 || b.p == 1.0; },
                        [](const Gaussian& g) { return g.sigma == 0.0; },
                        [](const Discrete& d) {
                          return std::count_if(d.probs.begin(), d.probs.end(),
                                               [](double w) { return w > 0.0; }) <= 1;
                        },
                    },
                    kind_);
}

double log_weighted_sum_exp(std::span<const double> exponents, std::span<const double> weights) {
  double shift = -std::numeric_limits<double>::infinity();
  double total_weight = 0.0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (weights[i] > 0.0) {
      shift = std::max(shift, exponents[i]);
      total_weight += weights[i];
    }
  }
  if (!std::isfinite(shift)) throw NumericError("log-sum-exp: no finite terms");
  // sum w e^{a - m} = W + sum w expm1(a - m); log1p keeps precision when the sum is near one.
  double excess = total_weight - 1.0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (weights[i] > 0.0) excess += weights[i] * std::expm1(exponents[i] - shift);
  }
  return shift + std::log1p(excess);
}

double mean(const RewardDistribution& d) {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) { return b.p; },
                        [](const Gaussian& g) { return g.mu; },
                        [](const Discrete& x) {
                          double m = 0.0;
                          for (std::size_t i = 0; i < x.support.size(); ++i) m += x.probs[i] * x.support[i];
                          return m;
                        },
                    },
                    d.kind());
}

CumulantSet cumulants_by_moments(std::span<const double> support, std::span<const double> probs) {
  double mu = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) mu += probs[i] * support[i];
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double z = support[i] - mu;
    const double z2 = z * z;
    m2 += probs[i] * z2;
    m3 += probs[i] * z2 * z;
    m4 += probs[i] * z2 * z2;
  }
  return {mu, m2, m3, m4 - 3.0 * m2 * m2};
}

CumulantSet cumulants(const RewardDistribution& d) {
  return std::visit(Overloaded{
                        [](const Bernoulli& b) {
                          const double v = b.p * (1.0 - b.p);
                          return CumulantSet{b.p, v, v * (1.0 - 2.0 * b.p), v * (1.0 - 6.0 * v)};
                        },
                        [](const Gaussian& g) { return CumulantSet{g.mu, g.sigma * g.sigma, 0.0, 0.0}; },
                        [](const Discrete& x) { return cumulants_by_moments(x.support, x.probs); },
                    },
                    d.kind());
}

double cgf_centered(const RewardDistribution& d, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("cgf_centered: t must be finite");
  if (t == 0.0 || d.degenerate()) return 0.0;
  const double value = std::visit(
      Overloaded{
          [t](const Bernoulli& b) {
            const double exps[] = {-b.p * t, (1.0 - b.p) * t};
            const double w[] = {1.0 - b.p, b.p};
            return log_weighted_sum_exp(exps, w);
          },
          [t](const Gaussian& g) { return 0.5 * g.sigma * g.sigma * t * t; },
          [t](const Discrete& x) {
            double mu = 0.0;
            for (std::size_t i = 0; i < x.support.size(); ++i) mu += x.probs[i] * x.support[i];
            std::vector<double> exps(x.support.size());
            for (std::size_t i = 0; i < x.support.size(); ++i) exps[i] = t * (x.support[i] - mu);
            return log_weighted_sum_exp(exps, x.probs);
          },
      },
      d.kind());
  return checked(value, "cgf_centered");
}

double cgf_raw(const RewardDistribution& d, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("cgf_raw: t must be finite");
  if (t == 0.0) return 0.0;
  const double value = std::visit(
      Overloaded{
          [t](const Bernoulli& b) {
            const double exps[] = {0.0, t};
            const double w[] = {1.0 - b.p, b.p};
            return log_weighted_sum_exp(exps, w);
          },
          [t](const Gaussian& g) { return g.mu * t + 0.5 * g.sigma * g.sigma * t * t; },
          [t](const Discrete& x) {
            std::vector<double> exps(x.support.size());
            for (std::size_t i = 0; i < x.support.size(); ++i) exps[i] = t * x.support[i];
            return log_weighted_sum_exp(exps, x.probs);
          },
      },
      d.kind());
  return checked(value, "cgf_raw");
}

std::vector<double> sample(const RewardDistribution& d, RandomStream& rng, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  std::visit(Overloaded{
                 [&](const Bernoulli& b) {
                   for (std::size_t i = 0; i < n; ++i) out.push_back(uniform01(rng) < b.p ? 1.0 : 0.0);
                 },
                 [&](const Gaussian& g) {
                   std::normal_distribution<double> normal(g.mu, g.sigma);
                   for (std::size_t i = 0; i < n; ++i) out.push_back(g.sigma == 0.0 ? g.mu : normal(rng));
                 },
                 [&](const Discrete& x) {
                   std::vector<double> cdf(x.probs.size());
                   std::partial_sum(x.probs.begin(), x.probs.end(), cdf.begin());
                   for (std::size_t i = 0; i < n; ++i) {
                     const double u = uniform01(rng) * cdf.back();
                     auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
                     if (it == cdf.end()) --it;
                     out.push_back(x.support[static_cast<std::size_t>(it - cdf.begin())]);
                   }
                 },
             },
             d.kind());
  return out;
}

}  // namespace odf
