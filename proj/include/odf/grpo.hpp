#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odf {

/// One prompt's G sampled rewards with the statistics training consumes.
struct RolloutGroup {
  std::string prompt_id;
  std::vector<double> rewards;
  double pass_rate = 0.0;
  std::vector<double> advantages;

  bool operator==(const RolloutGroup&) const = default;
};

/// Builds a group from binary accuracy rewards. Throws if fewer than two
/// rewards or any reward is not 0/1.
RolloutGroup make_rollout_group(std::string prompt_id, std::vector<double> binary_rewards);

/// (r_i - mean) / std with the population (divide-by-G) deviation. A group
/// whose rewards are all equal carries no signal and maps to all zeros.
std::vector<double> group_advantages(std::span<const double> rewards);

/// Mean of 0/1 rewards.
double empirical_pass_rate(std::span<const double> binary_rewards);

enum class DifficultyCategory { AbsoluteHard, SoftHard, Intermediate, SoftEasy, AbsoluteEasy };

inline constexpr double kDefaultEpsilon = 0.1;

/// 0 -> AbsoluteHard, (0, eps] -> SoftHard, (eps, 1-eps) -> Intermediate,
/// [1-eps, 1) -> SoftEasy, 1 -> AbsoluteEasy.
DifficultyCategory categorize(double pass_rate, double epsilon = kDefaultEpsilon);

std::string_view to_string(DifficultyCategory c);

}  // namespace odf
