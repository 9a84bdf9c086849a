#include "odf/bounds_suite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "odf/learnability.hpp"
#include "odf/random.hpp"
#include "odf/reward_models.hpp"
#include "odf/strategy.hpp"

namespace odf {
namespace {

/// Tracks the worst deviation of a check and remembers its first failure.
class Check {
 public:
  Check(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }

  void record(double deviation, bool ok, const std::string& what) {
    ++result_.cases;
    result_.worst = std::max(result_.worst, deviation);
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.failure = what;
    }
  }

  void within(double deviation, const std::string& what) {
    record(deviation, deviation <= result_.tolerance, what);
  }

  CheckResult done() && { return std::move(result_); }

 private:
  CheckResult result_;
};

std::string describe(std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : fields) {
    out << (first ? "" : ", ") << k << "=" << format_double(v);
    first = false;
  }
  return out.str();
}

RewardDistribution random_discrete(RandomStream& rng) {
  const std::size_t n = 2 + rng() % 7;  // support size 2..8
  std::vector<double> support;
  double v = std::floor(uniform01(rng) * 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    support.push_back(v);
    v += 0.25 + uniform01(rng);
  }
  std::vector<double> probs(n);
  double total = 0.0;
  for (double& w : probs) total += (w = 0.05 + uniform01(rng));
  for (double& w : probs) w /= total;
  double rest = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rest += probs[i];
  probs.back() = 1.0 - rest;
  return RewardDistribution::discrete(std::move(support), std::move(probs));
}

}  // namespace

std::vector<double> BoundsSuiteOptions::default_p_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
  return grid;
}

bool BoundsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

BoundsReport run_bounds_suite(const BoundsSuiteOptions& options) {
  if (options.betas.empty()) throw std::invalid_argument("verify-bounds: need at least one beta");
  for (double b : options.betas) Temperature{b};
  for (double p : options.p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("verify-bounds: p-grid values must lie in [0, 1]");
  }
  if (options.samples < 2) throw std::invalid_argument("verify-bounds: need at least 2 samples");

  BoundsReport report;
  std::vector<double> betas = options.betas;
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());

  // KL table over the requested grid.
  for (double b : betas) {
    const Temperature temp(b);
    for (double p : options.p_grid) {
      const auto d = RewardDistribution::bernoulli(p);
      const double kl = exact_reverse_kl(d, temp);
      const double bound = variance_lower_bound(d, temp);
      report.kl_table.push_back(
          {b, p, kl, bound, kl - bound, (kl - bound) * b * b * b, cumulants(d).kappa3 / 6.0});
    }
  }

  {
    Check check("degeneracy", kIdentityTolerance);
    std::vector<double> all_betas = betas;
    for (double b : {0.5, 1.0, 2.0, 8.0, 64.0}) all_betas.push_back(b);
    for (double b : all_betas) {
      for (double p : {0.0, 1.0}) {
        const auto d = RewardDistribution::bernoulli(p);
        const double kl = exact_reverse_kl(d, Temperature(b));
        const double bound = variance_lower_bound(d, Temperature(b));
        check.within(std::max(std::abs(kl), std::abs(bound)), describe({{"p", p}, {"beta", b}, {"kl", kl}}));
      }
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    Check check("nonnegativity", kIdentityTolerance);
    for (const auto& row : report.kl_table) {
      check.within(std::max(0.0, -row.exact_kl), describe({{"p", row.p}, {"beta", row.beta}, {"kl", row.exact_kl}}));
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    Check check("gaussian_exactness", kIdentityTolerance);
    for (double sigma : {0.0, 0.5, 1.0, 2.0}) {
      for (double b : {0.5, 1.0, 4.0}) {
        const auto d = RewardDistribution::gaussian(0.0, sigma);
        const Temperature temp(b);
        const double kl = exact_reverse_kl(d, temp);
        const double via_value = reverse_kl_via_soft_value(d, temp);
        const double expected = sigma * sigma / (2.0 * b * b);
        report.gaussian_table.push_back({sigma, b, kl, expected, kl - variance_lower_bound(d, temp)});
        check.within(std::max(std::abs(kl - expected), std::abs(via_value - expected)),
                     describe({{"sigma", sigma}, {"beta", b}, {"kl", kl}, {"expected", expected}}));
      }
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    Check check("cgf_identity", kIdentityTolerance);
    auto rng = derive_stream(options.seed, "verify-cgf");
    for (int i = 0; i < 50; ++i) {
      const auto d = random_discrete(rng);
      const double b = 0.5 + 7.5 * uniform01(rng);
      const Temperature temp(b);
      const double centered = exact_reverse_kl(d, temp);
      const double via_value = reverse_kl_via_soft_value(d, temp);
      check.within(std::abs(centered - via_value),
                   describe({{"case", static_cast<double>(i)}, {"beta", b}, {"centered", centered}, {"value_form", via_value}}));
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    // residual * beta^3 -> kappa3 / 6, checked at the largest beta.
    Check check("residual_asymptotics", kAsymptoticTolerance);
    const double b = betas.back();
    for (double p : options.p_grid) {
      const auto d = RewardDistribution::bernoulli(p);
      const Temperature temp(b);
      const double scaled = (exact_reverse_kl(d, temp) - variance_lower_bound(d, temp)) * b * b * b;
      const double limit = cumulants(d).kappa3 / 6.0;
      check.within(std::abs(scaled - limit), describe({{"p", p}, {"beta", b}, {"scaled_residual", scaled}, {"limit", limit}}));
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    // The unexpanded inequality KL >= p(1-p)/(2 beta^2), where the third
    // cumulant is positive and beta >= 8.
    Check check("raw_bound_positive_skew", 0.0);
    for (const auto& row : report.kl_table) {
      if (row.beta < 8.0 || row.kappa3_over_6 <= 0.0) continue;
      check.record(std::max(0.0, -row.residual), row.residual >= 0.0,
                   describe({{"p", row.p}, {"beta", row.beta}, {"kl", row.exact_kl}, {"bound", row.variance_bound}}));
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    // 99-point profile is unimodal with an interior maximizer near 1/2.
    Check check("profile_unimodal", 0.05);
    std::vector<double> grid;
    for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
    for (double b : betas) {
      if (b < 4.0) continue;
      const auto profile = kl_profile(Temperature(b), grid);
      std::size_t peak = 0;
      for (std::size_t i = 1; i < profile.size(); ++i) {
        if (profile[i].kl > profile[peak].kl) peak = i;
      }
      bool unimodal = peak > 0 && peak + 1 < profile.size();
      for (std::size_t i = 1; i < profile.size(); ++i) {
        const bool rising = profile[i].kl > profile[i - 1].kl;
        unimodal = unimodal && (i <= peak ? rising : !rising);
      }
      const double offset = std::abs(profile[peak].p - 0.5);
      check.record(offset, unimodal && offset <= 0.05, describe({{"beta", b}, {"argmax", profile[peak].p}}));
    }
    report.checks.push_back(std::move(check).done());
  }

  {
    // Deviation in units of the estimator's standard error.
    Check check("monte_carlo", kMonteCarloSigmas);
    struct Case {
      const char* name;
      RewardDistribution dist;
      double beta;
    };
    const Case cases[] = {{"gaussian", RewardDistribution::gaussian(0.0, 1.0), 2.0},
                          {"bernoulli", RewardDistribution::bernoulli(0.5), 1.0}};
    for (const auto& c : cases) {
      auto rng = derive_stream(options.seed, "verify-mc", {stable_hash(c.name)});
      const auto draws = sample(c.dist, rng, options.samples);
      const Temperature temp(c.beta);
      const auto est = monte_carlo_kl_estimate(draws, temp);
      const double exact = exact_reverse_kl(c.dist, temp);
      const double z = est.standard_error > 0.0 ? std::abs(est.value - exact) / est.standard_error
                                                : (est.value == exact ? 0.0 : INFINITY);
      check.within(z, std::string(c.name) + ": " +
                          describe({{"estimate", est.value}, {"exact", exact}, {"se", est.standard_error}}));
    }
    report.checks.push_back(std::move(check).done());
  }

  return report;
}

std::string BoundsReport::to_json() const {
  nlohmann::ordered_json j;
  j["all_passed"] = all_passed();
  auto& checks_json = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    cj["cases"] = c.cases;
    cj["worst"] = c.worst;
    cj["tolerance"] = c.tolerance;
    if (!c.passed) cj["failure"] = c.failure;
    checks_json.push_back(cj);
  }
  auto& kl = j["kl_table"] = nlohmann::ordered_json::array();
  for (const auto& r : kl_table) {
    kl.push_back({{"beta", r.beta},
                  {"p", r.p},
                  {"exact_kl", r.exact_kl},
                  {"variance_bound", r.variance_bound},
                  {"residual", r.residual},
                  {"scaled_residual", r.scaled_residual},
                  {"kappa3_over_6", r.kappa3_over_6}});
  }
  auto& gauss = j["gaussian_table"] = nlohmann::ordered_json::array();
  for (const auto& r : gaussian_table) {
    gauss.push_back({{"sigma", r.sigma},
                     {"beta", r.beta},
                     {"exact_kl", r.exact_kl},
                     {"expected", r.expected},
                     {"residual", r.residual}});
  }
  return j.dump(2) + "\n";
}

}  // namespace odf
