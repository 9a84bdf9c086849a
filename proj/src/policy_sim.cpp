#include "odf/policy_sim.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "odf/random.hpp"

namespace odf {

TaskPool::TaskPool(std::vector<Task> tasks) : tasks_(std::move(tasks)), visits_(tasks_.size(), 0) {
  index_.reserve(tasks_.size());
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!std::isfinite(tasks_[i].difficulty)) {
      throw std::invalid_argument("TaskPool: non-finite difficulty for task '" + tasks_[i].id + "'");
    }
    if (!index_.emplace(tasks_[i].id, i).second) {
      throw std::invalid_argument("TaskPool: duplicate task id '" + tasks_[i].id + "'");
    }
  }
}

TaskPool TaskPool::generate(std::size_t size, double mean, double stddev, std::uint64_t seed) {
  auto rng = derive_stream(seed, "pool");
  std::normal_distribution<double> normal(mean, stddev);
  std::vector<Task> tasks;
  tasks.reserve(size);
  for (std::size_t i = 0; i < size; ++i) tasks.push_back({"t" + std::to_string(i), normal(rng)});
  return TaskPool(std::move(tasks));
}

TaskPool TaskPool::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file " + path.string());
  std::vector<Task> tasks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    std::string id;
    if (!(fields >> id)) continue;
    double difficulty = 0.0;
    std::string extra;
    if (!(fields >> difficulty) || (fields >> extra)) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'task_id, difficulty'");
    }
    tasks.push_back({std::move(id), difficulty});
  }
  return TaskPool(std::move(tasks));
}

std::optional<std::size_t> TaskPool::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void TaskPool::reset_visits() { std::fill(visits_.begin(), visits_.end(), 0); }

std::vector<std::size_t> TaskPool::visit_histogram() const {
  std::vector<std::size_t> hist;
  for (std::uint32_t v : visits_) {
    if (v >= hist.size()) hist.resize(v + 1, 0);
    ++hist[v];
  }
  return hist;
}

double true_pass_rate(const SimPolicy& policy, double difficulty) {
  const double x = policy.ability - difficulty;
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

RolloutRequest make_rollout_request(const SimState& state, std::size_t task_index,
                                    std::size_t group_size) {
  const Task& task = state.pool.task(task_index);
  RolloutRequest request;
  request.task_id = task.id;
  request.difficulty = task.difficulty;
  request.ability = state.policy.ability;
  request.seed = state.seed;
  request.step = state.step;
  request.visit_index = state.pool.visit_count(task_index);
  request.group_size = group_size;
  return request;
}

std::optional<RolloutGroup> execute_rollout(const RolloutRequest& request, std::stop_token stop) {
  if (request.group_size < 2) throw std::invalid_argument("rollout: group size must be >= 2");
  const double p = true_pass_rate({request.ability, 0.0, Dynamics::FixedGain}, request.difficulty);
  auto rng = derive_stream(request.seed, request.stream,
                           {request.step, stable_hash(request.task_id), request.visit_index});
  std::vector<double> rewards;
  rewards.reserve(request.group_size);
  for (std::size_t i = 0; i < request.group_size; ++i) {
    if (stop.stop_requested()) return std::nullopt;
    rewards.push_back(uniform01(rng) < p ? 1.0 : 0.0);
  }
  return make_rollout_group(request.task_id, std::move(rewards));
}

RolloutGroup rollout(const SimState& state, std::string_view task_id, std::size_t group_size) {
  const auto index = state.pool.index_of(task_id);
  if (!index) throw std::invalid_argument("rollout: unknown task '" + std::string(task_id) + "'");
  return *execute_rollout(make_rollout_request(state, *index, group_size));
}

void apply_update(SimState& state, const TrainBatch& batch) {
  if (batch.groups.empty()) throw std::invalid_argument("apply_update: empty batch");
  SimPolicy& policy = state.policy;
  switch (policy.dynamics) {
    case Dynamics::VarianceDriven: {
      double signal = 0.0;
      for (const auto& g : batch.groups) signal += g.pass_rate * (1.0 - g.pass_rate);
      policy.ability += policy.learning_rate * signal / static_cast<double>(batch.groups.size());
      break;
    }
    case Dynamics::FixedGain:
      policy.ability += policy.learning_rate;
      break;
  }
  ++state.step;
}

double validation_accuracy(const SimPolicy& policy, std::span<const double> holdout) {
  if (holdout.empty()) throw std::invalid_argument("validation_accuracy: empty holdout");
  double total = 0.0;
  for (double d : holdout) total += true_pass_rate(policy, d);
  return total / static_cast<double>(holdout.size());
}

std::vector<double> make_holdout(std::size_t size, double mean, double stddev, std::uint64_t seed) {
  auto rng = derive_stream(seed, "holdout");
  std::normal_distribution<double> normal(mean, stddev);
  std::vector<double> out(size);
  for (double& d : out) d = normal(rng);
  return out;
}

}  // namespace odf
