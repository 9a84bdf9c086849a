#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "odf/bounds_suite.hpp"
#include "odf/config.hpp"
#include "odf/orchestrator.hpp"

namespace odf {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // runtime error or failed check
inline constexpr int kUsage = 2;    // bad arguments or config
}  // namespace exit_code

/// Validation accuracy a strategy has to reach: the best value the Plain
/// baseline attains over the same horizon with the same seed.
double plain_target(const ExperimentConfig& config);

struct CompareRow {
  std::string strategy;
  bool ok = true;
  std::string error;
  double final_val_acc = 0.0;
  double max_val_acc = 0.0;
  std::optional<std::uint64_t> steps_to_target;
  std::size_t total_rollouts = 0;
  std::size_t wasted_rollouts = 0;
  std::size_t underfilled_steps = 0;
  std::vector<double> difficulty_trace;
  std::vector<double> val_acc_trace;

  bool operator==(const CompareRow&) const = default;
};

/// Runs every strategy on the same seed and pool. A failing strategy is
/// reported in its row and does not stop the others.
std::vector<CompareRow> compare_strategies(const ExperimentConfig& base,
                                           const std::vector<StrategyKind>& strategies);

inline constexpr std::string_view kCompareCsvHeader =
    "strategy,status,final_val_acc,max_val_acc,steps_to_target,total_rollouts,wasted_rollouts,"
    "underfilled_steps";

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);
/// Long format: strategy,step,mean_difficulty,val_acc.
void write_difficulty_trace_csv(std::ostream& out, const std::vector<CompareRow>& rows);

struct SimulateArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

struct VerifyBoundsArgs {
  BoundsSuiteOptions options;
  std::string out_path = "bounds_report.json";
};

struct CompareArgs {
  std::string config_path;
  std::vector<std::string> strategies;
  std::optional<std::string> out_dir;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify_bounds(const VerifyBoundsArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err);

/// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace odf
