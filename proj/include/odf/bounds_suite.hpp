#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace odf {

struct BoundsSuiteOptions {
  std::vector<double> betas{4.0, 8.0, 16.0, 32.0, 64.0};
  /// Pass rates for the KL table and the residual checks.
  std::vector<double> p_grid = default_p_grid();
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0;

  /// 0, 0.05, ..., 0.95, 1.
  static std::vector<double> default_p_grid();
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  /// Largest observed deviation relative to the check's reference.
  double worst = 0.0;
  double tolerance = 0.0;
  /// First failing case, empty when the check passed.
  std::string failure;
};

struct KlRow {
  double beta;
  double p;
  double exact_kl;
  double variance_bound;
  double residual;
  double scaled_residual;  // residual * beta^3
  double kappa3_over_6;
};

struct GaussianRow {
  double sigma;
  double beta;
  double exact_kl;
  double expected;
  double residual;
};

struct BoundsReport {
  std::vector<CheckResult> checks;
  std::vector<KlRow> kl_table;
  std::vector<GaussianRow> gaussian_table;

  bool all_passed() const;
  std::string to_json() const;
};

inline constexpr double kIdentityTolerance = 1e-12;
inline constexpr double kAsymptoticTolerance = 5e-3;
inline constexpr double kMonteCarloSigmas = 3.0;

/// Runs degeneracy, nonnegativity, Gaussian exactness, CGF identity, residual
/// asymptotics, profile unimodality and Monte-Carlo convergence checks.
BoundsReport run_bounds_suite(const BoundsSuiteOptions& options);

}  // namespace odf
