#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "odf/batch.hpp"
#include "odf/grpo.hpp"

namespace odf {

struct Task {
  std::string id;
  double difficulty = 0.0;

  bool operator==(const Task&) const = default;
};

/// Prompt pool with per-iteration visit counts.
class TaskPool {
 public:
  TaskPool() = default;
  /// Throws std::invalid_argument on duplicate ids or non-finite difficulty.
  explicit TaskPool(std::vector<Task> tasks);

  /// `size` tasks named t0, t1, ... with difficulties ~ Normal(mean, stddev).
  static TaskPool generate(std::size_t size, double mean, double stddev, std::uint64_t seed);

  /// One `task_id, difficulty` record per line; blank lines and `#` comments skipped.
  static TaskPool load(const std::filesystem::path& path);

  std::size_t size() const noexcept { return tasks_.size(); }
  bool empty() const noexcept { return tasks_.empty(); }
  const Task& task(std::size_t index) const { return tasks_.at(index); }
  std::span<const Task> tasks() const noexcept { return tasks_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  std::uint32_t visit_count(std::size_t index) const { return visits_.at(index); }
  void increment_visit(std::size_t index) { ++visits_.at(index); }
  void reset_visits();
  /// histogram[k] = number of tasks visited exactly k times.
  std::vector<std::size_t> visit_histogram() const;

  bool operator==(const TaskPool& other) const {
    return tasks_ == other.tasks_ && visits_ == other.visits_;
  }

 private:
  std::vector<Task> tasks_;
  std::vector<std::uint32_t> visits_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Dynamics { VarianceDriven, FixedGain };

struct SimPolicy {
  double ability = -2.0;
  double learning_rate = 0.05;
  Dynamics dynamics = Dynamics::VarianceDriven;

  bool operator==(const SimPolicy&) const = default;
};

/// Everything a simulated run mutates. Fully determined by its seed and the
/// sequence of batches applied to it.
struct SimState {
  TaskPool pool;
  SimPolicy policy;
  std::uint64_t step = 0;
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;

  bool operator==(const SimState&) const = default;
};

/// Logistic item response: 1 / (1 + exp(-(ability - difficulty))).
double true_pass_rate(const SimPolicy& policy, double difficulty);

/// Inputs of one rollout job. Self-contained so a worker thread never reads
/// the live SimState.
struct RolloutRequest {
  std::string task_id;
  double difficulty = 0.0;
  double ability = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint32_t visit_index = 0;
  std::size_t group_size = 0;
  /// Purpose tag of the random stream; proxy estimates use their own.
  std::string_view stream = "rollout";
};

RolloutRequest make_rollout_request(const SimState& state, std::size_t task_index, std::size_t group_size);

/// Draws G Bernoulli rewards from the stream keyed by (seed, step, task, visit).
/// Returns nullopt if `stop` is requested before the group completes.
std::optional<RolloutGroup> execute_rollout(const RolloutRequest& request,
                                            std::stop_token stop = {});

/// Samples one group for `task_id` at the state's current step and visit
/// count. Does not touch visit counts. Throws on unknown task or G < 2.
RolloutGroup rollout(const SimState& state, std::string_view task_id, std::size_t group_size);

/// VarianceDriven: ability += eta * mean(p(1-p)) over the batch's empirical
/// pass rates. FixedGain: ability += eta. Advances the step counter.
void apply_update(SimState& state, const TrainBatch& batch);

/// Mean true pass rate over held-out difficulties.
double validation_accuracy(const SimPolicy& policy, std::span<const double> holdout);

/// Held-out difficulties from the same Normal(mean, stddev) as the pool, on
/// an independent stream.
std::vector<double> make_holdout(std::size_t size, double mean, double stddev, std::uint64_t seed);

}  // namespace odf
