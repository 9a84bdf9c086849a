#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "odf/orchestrator.hpp"

namespace odf {

/// Frozen run.csv header.
inline constexpr std::string_view kRunCsvHeader =
    "step,iteration,ability,val_acc,mean_pass,mean_difficulty,accepted,rejected,cancelled,rollouts,"
    "underfilled";

/// Six significant digits, locale independent ("%.6g" semantics).
std::string format_metric(double value);

void write_run_csv(std::ostream& out, const RunLog& log);

/// summary.json body. `steps_to_target` is null when the target was never reached.
std::string summary_json(const ExperimentConfig& config, const RunLog& log, double target,
                         std::optional<std::uint64_t> steps_to_target);

void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace odf
