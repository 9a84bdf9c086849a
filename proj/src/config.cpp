#include "odf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "odf/errors.hpp"

namespace odf {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class Int>
Int parse_unsigned(std::string_view key, std::string_view value) {
  Int out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': expected a nonnegative integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    return parse_double(value);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" +
                      std::string(value) + "'");
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string_view to_string(Dynamics dynamics) {
  return dynamics == Dynamics::VarianceDriven ? "variance" : "fixed";
}

std::string_view to_string(ExecutionMode mode) {
  return mode == ExecutionMode::Sequential ? "sequential" : "concurrent";
}

void ExperimentConfig::validate() const {
  require(pool_size > 0 || !task_file.empty(), "pool_size must be positive");
  require(std::isfinite(difficulty_mean), "difficulty_mean must be finite");
  require(difficulty_std >= 0.0, "difficulty_std must be nonnegative");
  require(std::isfinite(initial_ability), "initial_ability must be finite");
  require(eta > 0.0, "eta must be positive");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(group_size >= 2, "group_size must be >= 2");
  require(max_concurrency >= 1, "max_concurrency must be >= 1");
  require(epsilon > 0.0 && epsilon < 0.5, "epsilon must lie in (0, 0.5)");
  require(beta > 0.0, "beta must be positive");
  require(holdout_size >= 1, "holdout_size must be >= 1");
  try {
    parse_strategy(format_strategy(strategy));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  using Setter = std::function<void(std::string_view key, std::string_view value)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"seed", [&](auto k, auto v) { c.seed = parse_unsigned<std::uint64_t>(k, v); }},
      {"pool_size", [&](auto k, auto v) { c.pool_size = parse_unsigned<std::size_t>(k, v); }},
      {"difficulty_mean", [&](auto k, auto v) { c.difficulty_mean = parse_real(k, v); }},
      {"difficulty_std", [&](auto k, auto v) { c.difficulty_std = parse_real(k, v); }},
      {"initial_ability", [&](auto k, auto v) { c.initial_ability = parse_real(k, v); }},
      {"eta", [&](auto k, auto v) { c.eta = parse_real(k, v); }},
      {"dynamics",
       [&](auto k, auto v) {
         if (v == "variance") {
           c.dynamics = Dynamics::VarianceDriven;
         } else if (v == "fixed") {
           c.dynamics = Dynamics::FixedGain;
         } else {
           throw ConfigError("config key '" + std::string(k) + "': expected 'variance' or 'fixed'");
         }
       }},
      {"iterations", [&](auto k, auto v) { c.iterations = parse_unsigned<std::size_t>(k, v); }},
      {"steps_per_iteration",
       [&](auto k, auto v) { c.steps_per_iteration = parse_unsigned<std::size_t>(k, v); }},
      {"batch_size", [&](auto k, auto v) { c.batch_size = parse_unsigned<std::size_t>(k, v); }},
      {"group_size", [&](auto k, auto v) { c.group_size = parse_unsigned<std::size_t>(k, v); }},
      {"max_concurrency", [&](auto k, auto v) { c.max_concurrency = parse_unsigned<std::size_t>(k, v); }},
      {"strategy",
       [&](auto, auto v) {
         try {
           c.strategy = parse_strategy(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"epsilon", [&](auto k, auto v) { c.epsilon = parse_real(k, v); }},
      {"beta", [&](auto k, auto v) { c.beta = parse_real(k, v); }},
      {"holdout_size", [&](auto k, auto v) { c.holdout_size = parse_unsigned<std::size_t>(k, v); }},
      {"output_path", [&](auto, auto v) { c.output_path = std::string(v); }},
      {"task_file", [&](auto, auto v) { c.task_file = std::string(v); }},
      {"execution",
       [&](auto k, auto v) {
         if (v == "sequential") {
           c.execution = ExecutionMode::Sequential;
         } else if (v == "concurrent") {
           c.execution = ExecutionMode::Concurrent;
         } else {
           throw ConfigError("config key '" + std::string(k) +
                             "': expected 'sequential' or 'concurrent'");
         }
       }},
  };

  std::set<std::string, std::less<>> seen;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
    }
    it->second(key, value);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << '\n'
      << "pool_size = " << c.pool_size << '\n'
      << "difficulty_mean = " << format_double(c.difficulty_mean) << '\n'
      << "difficulty_std = " << format_double(c.difficulty_std) << '\n'
      << "initial_ability = " << format_double(c.initial_ability) << '\n'
      << "eta = " << format_double(c.eta) << '\n'
      << "dynamics = " << to_string(c.dynamics) << '\n'
      << "iterations = " << c.iterations << '\n'
      << "steps_per_iteration = " << c.steps_per_iteration << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "group_size = " << c.group_size << '\n'
      << "max_concurrency = " << c.max_concurrency << '\n'
      << "strategy = " << format_strategy(c.strategy) << '\n'
      << "epsilon = " << format_double(c.epsilon) << '\n'
      << "beta = " << format_double(c.beta) << '\n'
      << "holdout_size = " << c.holdout_size << '\n'
      << "output_path = " << c.output_path << '\n'
      << "task_file = " << c.task_file << '\n'
      << "execution = " << to_string(c.execution) << '\n';
  return out.str();
}

}  // namespace odf
