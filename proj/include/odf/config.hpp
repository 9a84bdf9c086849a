#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "odf/policy_sim.hpp"
#include "odf/strategy.hpp"

namespace odf {

enum class ExecutionMode { Sequential, Concurrent };

/// Everything needed to replay one simulated training run. Serialized as flat
/// `key = value` text with `#` comments.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t pool_size = 2000;
  double difficulty_mean = 0.0;
  double difficulty_std = 2.0;
  double initial_ability = -2.0;
  double eta = 0.05;
  Dynamics dynamics = Dynamics::VarianceDriven;
  std::size_t iterations = 1;
  std::size_t steps_per_iteration = 200;
  std::size_t batch_size = 16;
  std::size_t group_size = 16;
  std::size_t max_concurrency = 32;
  StrategyKind strategy = strategy::Plain{};
  double epsilon = 0.1;
  double beta = 1.0;
  std::size_t holdout_size = 1024;
  std::string output_path = "out";
  /// Optional pool file; when set it replaces the generated pool.
  std::string task_file;
  ExecutionMode execution = ExecutionMode::Sequential;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses config text. Unknown keys, malformed values and duplicate keys are
/// ConfigError. Missing keys keep their defaults.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every key, so parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

std::string_view to_string(Dynamics dynamics);
std::string_view to_string(ExecutionMode mode);

}  // namespace odf
