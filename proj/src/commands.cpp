#include "odf/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "odf/errors.hpp"
#include "odf/run_log.hpp"

namespace odf {
namespace {

namespace fs = std::filesystem;

/// Loads a config, mapping every failure to a usage error message.
std::optional<ExperimentConfig> load_for_command(const std::string& path, std::ostream& err) {
  if (!fs::exists(path)) {
    err << "error: config file not found: " << path << '\n';
    return std::nullopt;
  }
  try {
    ExperimentConfig config = load_config(path);
    if (!config.task_file.empty() && !fs::exists(config.task_file)) {
      err << "error: task file not found: " << config.task_file << '\n';
      return std::nullopt;
    }
    return config;
  } catch (const std::exception& e) {
    err << "error: invalid config " << path << ": " << e.what() << '\n';
    return std::nullopt;
  }
}

std::string optional_step(const std::optional<std::uint64_t>& step) {
  return step ? std::to_string(*step) : std::string("NA");
}

}  // namespace

double plain_target(const ExperimentConfig& config) {
  ExperimentConfig baseline = config;
  baseline.strategy = strategy::Plain{};
  const RunLog log = run_training(baseline);
  if (log.error) throw std::runtime_error("plain baseline failed: " + *log.error);
  return log.max_val_acc();
}

std::vector<CompareRow> compare_strategies(const ExperimentConfig& base,
                                           const std::vector<StrategyKind>& strategies) {
  std::optional<double> target;
  std::vector<CompareRow> rows;
  rows.reserve(strategies.size());
  for (const auto& kind : strategies) {
    ExperimentConfig config = base;
    config.strategy = kind;
    CompareRow row;
    row.strategy = format_strategy(kind);
    try {
      const RunLog log = run_training(config);
      if (std::holds_alternative<strategy::Plain>(kind) && !log.error && !target) {
        target = log.max_val_acc();
      }
      if (!target) target = plain_target(base);
      row.ok = !log.error;
      row.error = log.error.value_or("");
      row.final_val_acc = log.final_val_acc();
      row.max_val_acc = log.max_val_acc();
      row.steps_to_target = log.steps_to_target(*target);
      row.total_rollouts = log.total_rollouts();
      row.wasted_rollouts = log.wasted_rollouts();
      for (const auto& s : log.steps) {
        row.underfilled_steps += s.underfilled ? 1 : 0;
        row.difficulty_trace.push_back(s.mean_difficulty);
        row.val_acc_trace.push_back(s.val_acc);
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << kCompareCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.strategy << ',' << (r.ok ? "ok" : "failed") << ',' << format_metric(r.final_val_acc)
        << ',' << format_metric(r.max_val_acc) << ',' << optional_step(r.steps_to_target) << ','
        << r.total_rollouts << ',' << r.wasted_rollouts << ',' << r.underfilled_steps << '\n';
  }
}

void write_difficulty_trace_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "strategy,step,mean_difficulty,val_acc\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.difficulty_trace.size(); ++i) {
      out << r.strategy << ',' << i + 1 << ',' << format_metric(r.difficulty_trace[i]) << ','
          << format_metric(r.val_acc_trace[i]) << '\n';
    }
  }
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  auto config = load_for_command(args.config_path, err);
  if (!config) return exit_code::kUsage;
  if (args.seed) config->seed = *args.seed;
  if (args.out_dir) config->output_path = *args.out_dir;

  try {
    const RunLog log = run_training(*config);
    double target = log.max_val_acc();
    if (!std::holds_alternative<strategy::Plain>(config->strategy)) target = plain_target(*config);

    const fs::path dir = config->output_path;
    std::ostringstream csv;
    write_run_csv(csv, log);
    write_text_file(dir / "run.csv", csv.str());
    write_text_file(dir / "summary.json",
                    summary_json(*config, log, target, log.steps_to_target(target)));
    if (log.error) {
      err << "error: run aborted after " << log.steps.size() << " step(s): " << *log.error << '\n';
      return exit_code::kFailure;
    }
    out << "simulated " << log.steps.size() << " step(s), final val_acc "
        << format_metric(log.final_val_acc()) << ", wrote " << (dir / "run.csv").string() << '\n';
    return exit_code::kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
}

int cmd_verify_bounds(const VerifyBoundsArgs& args, std::ostream& out, std::ostream& err) {
  BoundsReport report;
  try {
    report = run_bounds_suite(args.options);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  try {
    write_text_file(args.out_path, report.to_json());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
  for (const auto& c : report.checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.cases << " cases, worst "
        << format_metric(c.worst) << ", tolerance " << format_metric(c.tolerance) << ")\n";
    if (!c.passed) err << "failing case in " << c.name << ": " << c.failure << '\n';
  }
  return report.all_passed() ? exit_code::kOk : exit_code::kFailure;
}

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  if (args.strategies.size() < 2) {
    err << "error: compare needs at least two strategies\n";
    return exit_code::kUsage;
  }
  std::vector<StrategyKind> kinds;
  try {
    for (const auto& s : args.strategies) kinds.push_back(parse_strategy(s));
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
  auto config = load_for_command(args.config_path, err);
  if (!config) return exit_code::kUsage;
  if (args.out_dir) config->output_path = *args.out_dir;

  try {
    const auto rows = compare_strategies(*config, kinds);
    const fs::path dir = config->output_path;
    std::ostringstream table, trace;
    write_compare_csv(table, rows);
    write_difficulty_trace_csv(trace, rows);
    write_text_file(dir / "compare.csv", table.str());
    write_text_file(dir / "difficulty_trace.csv", trace.str());
    out << table.str();
    bool all_ok = true;
    for (const auto& r : rows) {
      if (!r.ok) {
        all_ok = false;
        err << "strategy " << r.strategy << " failed: " << r.error << '\n';
      }
    }
    return all_ok ? exit_code::kOk : exit_code::kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kFailure;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online difficulty filtering simulator and learnability bounds"};
  app.require_subcommand(1);

  SimulateArgs sim;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Run one simulated training run");
  simulate->add_option("--config", sim.config_path, "Config file (key = value)")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Override the config seed");
  auto* out_opt = simulate->add_option("--out", sim_out, "Output directory");

  VerifyBoundsArgs verify;
  auto* verify_cmd = app.add_subcommand("verify-bounds", "Check the learnability identities and bounds");
  verify_cmd->add_option("--betas", verify.options.betas, "Comma-separated temperatures")->delimiter(',');
  verify_cmd->add_option("--p-grid", verify.options.p_grid, "Comma-separated pass rates")->delimiter(',');
  verify_cmd->add_option("--samples", verify.options.samples, "Monte-Carlo sample count");
  verify_cmd->add_option("--seed", verify.options.seed, "Seed for random cases");
  verify_cmd->add_option("--out", verify.out_path, "Report path");

  CompareArgs cmp;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "Compare filtering strategies on one seed");
  compare->add_option("--config", cmp.config_path, "Config file (key = value)")->required();
  compare->add_option("--strategies", cmp.strategies, "Comma-separated strategy specs")
      ->required()
      ->delimiter(',');
  auto* cmp_out_opt = compare->add_option("--out", cmp_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }

  if (simulate->parsed()) {
    if (seed_opt->count() > 0) sim.seed = sim_seed;
    if (out_opt->count() > 0) sim.out_dir = sim_out;
    return cmd_simulate(sim, out, err);
  }
  if (verify_cmd->parsed()) return cmd_verify_bounds(verify, out, err);
  if (cmp_out_opt->count() > 0) cmp.out_dir = cmp_out;
  return cmd_compare(cmp, out, err);
}

}  // namespace odf
