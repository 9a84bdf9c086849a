#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "odf/learnability.hpp"

using namespace odf;

namespace {

// Closed-form Bernoulli reverse KL, log((1-p) + p e^{1/beta}) - p/beta, in
// long double. Independent of the log-sum-exp path under test.
double bernoulli_kl_oracle(double p, double beta) {
  const long double t = 1.0L / beta;
  return static_cast<double>(std::log((1.0L - p) + p * std::exp(t)) - p * t);
}

}  // namespace

TEST_CASE("Temperature rejects non-positive beta") {
  CHECK_THROWS_AS(Temperature{0.0}, std::invalid_argument);
  CHECK_THROWS_AS(Temperature{-1.0}, std::invalid_argument);
  CHECK_THROWS_AS(Temperature{INFINITY}, std::invalid_argument);
  CHECK(Temperature(2.0).beta() == 2.0);
}

TEST_CASE("soft_value") {
  CHECK(soft_value(RewardDistribution::bernoulli(1.0), Temperature(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(soft_value(RewardDistribution::bernoulli(0.0), Temperature(0.3)) == 0.0);
  // ln((1+e)/2), 40-digit reference.
  CHECK(std::abs(soft_value(RewardDistribution::bernoulli(0.5), Temperature(1.0)) - 0.62011450695827752) <= 1e-15);
}

TEST_CASE("exact_reverse_kl") {
  CHECK(std::abs(exact_reverse_kl(RewardDistribution::bernoulli(0.5), Temperature(1.0)) - 0.12011450695827752) <= 1e-15);
  CHECK(exact_reverse_kl(RewardDistribution::gaussian(-3.0, 2.0), Temperature(4.0)) == 0.125);
  for (double b : {0.01, 0.5, 1.0, 64.0}) {
    CHECK(exact_reverse_kl(RewardDistribution::bernoulli(1.0), Temperature(b)) == 0.0);
    CHECK(exact_reverse_kl(RewardDistribution::bernoulli(0.0), Temperature(b)) == 0.0);
  }
}

TEST_CASE("both KL routes agree with the closed form") {
  for (int i = 1; i < 100; ++i) {
    const double p = i / 100.0;
    for (double b : {0.5, 1.0, 2.0, 8.0, 64.0}) {
      const auto d = RewardDistribution::bernoulli(p);
      const double oracle = bernoulli_kl_oracle(p, b);
      CHECK(std::abs(exact_reverse_kl(d, Temperature(b)) - oracle) <= 1e-12);
      CHECK(std::abs(reverse_kl_via_soft_value(d, Temperature(b)) - oracle) <= 1e-12);
      CHECK(exact_reverse_kl(d, Temperature(b)) >= -1e-12);
    }
  }
}

TEST_CASE("small beta does not overflow") {
  const double kl = exact_reverse_kl(RewardDistribution::bernoulli(0.5), Temperature(1e-3));
  CHECK(std::isfinite(kl));
  CHECK(kl == doctest::Approx(500.0 + std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("Gaussian exactness") {
  for (double sigma : {0.0, 0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 4.0}) {
      const auto d = RewardDistribution::gaussian(0.7, sigma);
      const auto report = learnability_report(d, Temperature(b));
      CHECK(std::abs(report.exact_kl - sigma * sigma / (2 * b * b)) <= 1e-12);
      CHECK(std::abs(report.residual) <= 1e-12);
    }
  }
}

TEST_CASE("variance_lower_bound") {
  CHECK(variance_lower_bound(RewardDistribution::bernoulli(0.5), Temperature(1.0)) == 0.125);
  CHECK(variance_lower_bound(RewardDistribution::bernoulli(0.0), Temperature(3.0)) == 0.0);
  CHECK(variance_lower_bound(RewardDistribution::bernoulli(0.3), Temperature(2.0)) == doctest::Approx(0.02625).epsilon(1e-14));
}

TEST_CASE("the unexpanded bound fails at p = 1/2 for finite beta") {
  // Fourth cumulant is negative, so the exact value sits below the variance term.
  const auto r = learnability_report(RewardDistribution::bernoulli(0.5), Temperature(1.0));
  CHECK(r.exact_kl < r.variance_bound);
  CHECK(r.residual == doctest::Approx(0.12011450695827752 - 0.125));
}

TEST_CASE("bound_residual_scan") {
  const std::vector<double> betas{16, 32, 64};
  SUBCASE("p = 1/2 tends to zero") {
    const auto scan = bound_residual_scan(RewardDistribution::bernoulli(0.5), betas);
    // 40-digit references for residual * beta^3.
    CHECK(scan[0].scaled_residual == doctest::Approx(-0.00032543608740595928).epsilon(1e-6));
    CHECK(scan[1].scaled_residual == doctest::Approx(-0.00016274982107065257).epsilon(1e-6));
    CHECK(scan[2].scaled_residual == doctest::Approx(-0.00008137888381021309).epsilon(1e-6));
    CHECK(std::abs(scan[2].scaled_residual) < std::abs(scan[1].scaled_residual));
  }
  SUBCASE("p = 0.2 tends to kappa3 / 6 = 0.016") {
    const auto scan = bound_residual_scan(RewardDistribution::bernoulli(0.2), betas);
    CHECK(scan[0].scaled_residual == doctest::Approx(0.016013752361411867).epsilon(1e-6));
    CHECK(scan[2].scaled_residual == doctest::Approx(0.016003986362744650).epsilon(1e-6));
    CHECK(std::abs(scan[2].scaled_residual - 0.016) < std::abs(scan[0].scaled_residual - 0.016));
  }
  SUBCASE("Gaussian residual is identically zero") {
    for (const auto& pt : bound_residual_scan(RewardDistribution::gaussian(0, 1), kDefaultResidualBetas)) {
      CHECK(pt.scaled_residual == 0.0);
    }
  }
  SUBCASE("arguments") {
    CHECK_THROWS(bound_residual_scan(RewardDistribution::bernoulli(0.5), std::vector<double>{4, 8}));
    CHECK_THROWS(bound_residual_scan(RewardDistribution::bernoulli(0.5), std::vector<double>{0.5, 8, 16}));
    CHECK_THROWS(bound_residual_scan(RewardDistribution::bernoulli(0.5), std::vector<double>{16, 8, 32}));
  }
  SUBCASE("asymptotic tolerance over the pass-rate grid at beta = 64") {
    for (int k = 1; k <= 19; ++k) {
      const double p = k * 0.05;
      const auto scan = bound_residual_scan(RewardDistribution::bernoulli(p), kDefaultResidualBetas);
      const double kappa3 = p * (1 - p) * (1 - 2 * p);
      CHECK(std::abs(scan.back().scaled_residual - kappa3 / 6) <= 5e-3);
    }
  }
}

TEST_CASE("kl_profile") {
  const std::vector<double> ends{0.0, 1.0};
  for (const auto& pt : kl_profile(Temperature(3.0), ends)) CHECK(pt.kl == 0.0);

  const std::vector<double> half{0.5};
  // 40-digit reference: log(0.5 + 0.5 e^{0.1}) - 0.05.
  CHECK(std::abs(kl_profile(Temperature(10.0), half)[0].kl - 0.0012494795136255854) <= 1e-15);

  std::vector<double> grid;
  for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
  for (double b : {4.0, 8.0, 16.0}) {
    const auto profile = kl_profile(Temperature(b), grid);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < profile.size(); ++i) {
      if (profile[i].kl > profile[peak].kl) peak = i;
    }
    CHECK(peak > 0);
    CHECK(peak + 1 < profile.size());
    for (std::size_t i = 1; i <= peak; ++i) CHECK(profile[i].kl > profile[i - 1].kl);
    for (std::size_t i = peak + 1; i < profile.size(); ++i) CHECK(profile[i].kl < profile[i - 1].kl);
    CHECK(std::abs(profile[peak].p - 0.5) <= 0.05);
  }
}

TEST_CASE("monte_carlo_kl_estimate") {
  CHECK_THROWS_AS(monte_carlo_kl_estimate(std::vector<double>{1.0}, Temperature(1.0)), std::invalid_argument);
  CHECK(monte_carlo_kl_estimate(std::vector<double>(10, 3.0), Temperature(1.0)).value == 0.0);

  SUBCASE("Gaussian converges to sigma^2 / (2 beta^2)") {
    RandomStream rng(101);
    const auto draws = sample(RewardDistribution::gaussian(0, 1), rng, 1'000'000);
    const auto est = monte_carlo_kl_estimate(draws, Temperature(2.0));
    CHECK(std::abs(est.value - 0.125) <= 3 * est.standard_error);
  }
  SUBCASE("Bernoulli converges to the closed form") {
    RandomStream rng(102);
    const auto draws = sample(RewardDistribution::bernoulli(0.5), rng, 1'000'000);
    const auto est = monte_carlo_kl_estimate(draws, Temperature(1.0));
    CHECK(std::abs(est.value - 0.12011450695827752) <= 3 * est.standard_error);
  }
}
