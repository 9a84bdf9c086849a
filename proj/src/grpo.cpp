#include "odf/grpo.hpp"

#include <cmath>
#include <stdexcept>

namespace odf {

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) throw std::invalid_argument("group_advantages: need at least 2 rewards");
  double m = 0.0;
  for (double r : rewards) m += r;
  m /= static_cast<double>(g);

  std::vector<double> adv(g, 0.0);
  bool all_equal = true;
  for (double r : rewards) all_equal = all_equal && (r == rewards[0]);
  if (all_equal) return adv;

  double ss = 0.0;
  for (double r : rewards) ss += (r - m) * (r - m);
  const double sd = std::sqrt(ss / static_cast<double>(g));
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - m) / sd;
  return adv;
}

double empirical_pass_rate(std::span<const double> binary_rewards) {
  if (binary_rewards.empty()) throw std::invalid_argument("empirical_pass_rate: empty rewards");
  std::size_t ones = 0;
  for (double r : binary_rewards) {
    if (r == 1.0) {
      ++ones;
    } else if (r != 0.0) {
      throw std::invalid_argument("empirical_pass_rate: rewards must be 0 or 1");
    }
  }
  return static_cast<double>(ones) / static_cast<double>(binary_rewards.size());
}

RolloutGroup make_rollout_group(std::string prompt_id, std::vector<double> binary_rewards) {
  if (binary_rewards.size() < 2) throw std::invalid_argument("RolloutGroup: need G >= 2");
  RolloutGroup group;
  group.prompt_id = std::move(prompt_id);
  group.pass_rate = empirical_pass_rate(binary_rewards);
  group.advantages = group_advantages(binary_rewards);
  group.rewards = std::move(binary_rewards);
  return group;
}

DifficultyCategory categorize(double pass_rate, double epsilon) {
  if (!(pass_rate >= 0.0 && pass_rate <= 1.0)) {
    throw std::invalid_argument("categorize: pass rate must lie in [0, 1]");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("categorize: epsilon must lie in (0, 0.5)");
  }
  if (pass_rate == 0.0) return DifficultyCategory::AbsoluteHard;
  if (pass_rate <= epsilon) return DifficultyCategory::SoftHard;
  if (pass_rate < 1.0 - epsilon) return DifficultyCategory::Intermediate;
  if (pass_rate < 1.0) return DifficultyCategory::SoftEasy;
  return DifficultyCategory::AbsoluteEasy;
}

std::string_view to_string(DifficultyCategory c) {
  switch (c) {
    case DifficultyCategory::AbsoluteHard: return "absolute_hard";
    case DifficultyCategory::SoftHard: return "soft_hard";
    case DifficultyCategory::Intermediate: return "intermediate";
    case DifficultyCategory::SoftEasy: return "soft_easy";
    case DifficultyCategory::AbsoluteEasy: return "absolute_easy";
  }
  return "unknown";
}

}  // namespace odf
