#include "odf/run_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace odf {

std::string format_metric(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 6);
  if (ec != std::errc()) throw std::runtime_error("format_metric failed");
  return std::string(buf, end);
}

void write_run_csv(std::ostream& out, const RunLog& log) {
  out << kRunCsvHeader << '\n';
  for (const auto& s : log.steps) {
    out << s.step << ',' << s.iteration << ',' << format_metric(s.ability) << ','
        << format_metric(s.val_acc) << ',' << format_metric(s.mean_pass) << ','
        << format_metric(s.mean_difficulty) << ',' << s.accepted << ',' << s.rejected << ','
        << s.cancelled << ',' << s.rollouts << ',' << (s.underfilled ? 1 : 0) << '\n';
  }
}

std::string summary_json(const ExperimentConfig& config, const RunLog& log, double target,
                         std::optional<std::uint64_t> steps_to_target) {
  nlohmann::ordered_json j;
  j["strategy"] = format_strategy(config.strategy);
  j["seed"] = config.seed;
  j["steps"] = log.steps.size();
  j["status"] = log.error ? "error" : "ok";
  if (log.error) j["error"] = *log.error;
  j["initial_val_acc"] = log.initial_val_acc;
  j["final_val_acc"] = log.final_val_acc();
  j["max_val_acc"] = log.max_val_acc();
  j["target_val_acc"] = target;
  j["steps_to_target"] = steps_to_target ? nlohmann::ordered_json(*steps_to_target) : nullptr;
  j["total_rollouts"] = log.total_rollouts();
  j["wasted_rollouts"] = log.wasted_rollouts();
  std::size_t underfilled = 0, peak = 0;
  for (const auto& s : log.steps) {
    underfilled += s.underfilled ? 1 : 0;
    peak = std::max(peak, s.max_in_flight);
  }
  j["underfilled_steps"] = underfilled;
  j["peak_in_flight"] = peak;
  j["mean_accepted_kl"] = log.mean_accepted_kl;
  j["beta"] = config.beta;
  j["epsilon"] = config.epsilon;
  nlohmann::ordered_json cats;
  for (std::size_t i = 0; i < log.category_counts.size(); ++i) {
    cats[std::string(to_string(static_cast<DifficultyCategory>(i)))] = log.category_counts[i];
  }
  j["category_counts"] = cats;
  j["final_visit_histogram"] =
      log.steps.empty() ? std::vector<std::size_t>{} : log.steps.back().visit_histogram;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace odf
