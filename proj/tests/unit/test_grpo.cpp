#include <cmath>
#include <set>

#include <stdexcept>

#include "doctest.h"
#include "odf/grpo.hpp"
#include "odf/random.hpp"

using namespace odf;

TEST_CASE("group_advantages examples") {
  CHECK(group_advantages(std::vector<double>{1, 0, 0, 1}) == std::vector<double>{1, -1, -1, 1});
  CHECK(group_advantages(std::vector<double>{1, 1, 1, 1}) == std::vector<double>(4, 0.0));
  CHECK(group_advantages(std::vector<double>{0, 0, 0, 0}) == std::vector<double>(4, 0.0));
  CHECK_THROWS_AS(group_advantages(std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(group_advantages(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("advantages are invariant to shifts and positive scaling") {
  auto rng = derive_stream(3, "test-adv");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> r(2 + rng() % 30);
    for (double& x : r) x = std::floor(uniform01(rng) * 4);
    const auto base = group_advantages(r);
    std::vector<double> shifted = r, scaled = r;
    for (double& x : shifted) x += 1024.0;
    for (double& x : scaled) x *= 8.0;
    const auto from_shifted = group_advantages(shifted);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(from_shifted[i] - base[i]) <= 1e-12);
    // Power-of-two scaling is exact in binary floating point.
    CHECK(group_advantages(scaled) == base);
  }
}

TEST_CASE("binary groups produce two advantage values whose weighted sum vanishes") {
  for (std::size_t g = 2; g <= 32; ++g) {
    for (std::size_t k = 1; k < g; ++k) {
      std::vector<double> r(g, 0.0);
      for (std::size_t i = 0; i < k; ++i) r[i] = 1.0;
      const auto adv = group_advantages(r);
      std::set<double> values(adv.begin(), adv.end());
      CHECK(values.size() == 2);
      CHECK(std::abs(k * adv.front() + (g - k) * adv.back()) <= 1e-10);
    }
  }
}

TEST_CASE("empirical_pass_rate") {
  CHECK(empirical_pass_rate(std::vector<double>{1, 0, 1, 1}) == 0.75);
  CHECK(empirical_pass_rate(std::vector<double>{0, 0}) == 0.0);
  CHECK(empirical_pass_rate(std::vector<double>(16, 1.0)) == 1.0);
  CHECK_THROWS_AS(empirical_pass_rate(std::vector<double>{1, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(empirical_pass_rate(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("make_rollout_group") {
  const auto g = make_rollout_group("x", {1, 0, 0, 1});
  CHECK(g.pass_rate == 0.5);
  CHECK(g.advantages == std::vector<double>{1, -1, -1, 1});
  CHECK_THROWS(make_rollout_group("x", {1}));
  CHECK_THROWS(make_rollout_group("x", {1, 2}));
}

TEST_CASE("categorize") {
  CHECK(categorize(0.0, 0.1) == DifficultyCategory::AbsoluteHard);
  CHECK(categorize(0.05, 0.1) == DifficultyCategory::SoftHard);
  CHECK(categorize(0.1, 0.1) == DifficultyCategory::SoftHard);
  CHECK(categorize(0.5, 0.1) == DifficultyCategory::Intermediate);
  CHECK(categorize(0.9, 0.1) == DifficultyCategory::SoftEasy);
  CHECK(categorize(0.95, 0.1) == DifficultyCategory::SoftEasy);
  CHECK(categorize(1.0, 0.1) == DifficultyCategory::AbsoluteEasy);
  CHECK(categorize(0.25, 0.25) == DifficultyCategory::SoftHard);
  CHECK(categorize(0.75, 0.25) == DifficultyCategory::SoftEasy);
  CHECK(categorize(0.5) == DifficultyCategory::Intermediate);
  CHECK_THROWS(categorize(-0.1, 0.1));
  CHECK_THROWS(categorize(1.1, 0.1));
  CHECK_THROWS(categorize(0.5, 0.0));
  CHECK_THROWS(categorize(0.5, 0.5));
  CHECK(to_string(DifficultyCategory::Intermediate) == "intermediate");
}
