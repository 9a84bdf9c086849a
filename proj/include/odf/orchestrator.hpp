#pragma once

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "odf/batch.hpp"
#include "odf/config.hpp"
#include "odf/policy_sim.hpp"
#include "odf/strategy.hpp"

namespace odf {

struct BatchSpec {
  std::size_t batch_size = 16;       // N
  std::size_t group_size = 16;       // G
  std::size_t max_concurrency = 32;  // C_max

  void validate() const;
};

/// Executes rollout jobs. `collect` blocks until the job is done; `cancel`
/// discards a job and returns only once it is no longer running.
class RolloutRunner {
 public:
  using Ticket = std::uint64_t;

  virtual ~RolloutRunner() = default;
  virtual Ticket submit(RolloutRequest request) = 0;
  virtual RolloutGroup collect(Ticket ticket) = 0;
  virtual void cancel(Ticket ticket) = 0;
  /// Largest number of jobs observed executing at the same time.
  virtual std::size_t peak_running() const = 0;
};

/// Runs each job lazily on the caller's thread when it is collected.
/// Cancelled jobs are never executed.
class SequentialRunner final : public RolloutRunner {
 public:
  Ticket submit(RolloutRequest request) override;
  RolloutGroup collect(Ticket ticket) override;
  void cancel(Ticket ticket) override;
  std::size_t peak_running() const override { return peak_; }

 private:
  Ticket next_ = 0;
  std::size_t peak_ = 0;
  std::unordered_map<Ticket, RolloutRequest> pending_;
};

/// Fixed pool of worker threads. Jobs start as soon as they are submitted;
/// cancellation requests a stop that the job observes between draws.
class ThreadPoolRunner final : public RolloutRunner {
 public:
  explicit ThreadPoolRunner(std::size_t workers);
  ~ThreadPoolRunner() override;
  ThreadPoolRunner(const ThreadPoolRunner&) = delete;
  ThreadPoolRunner& operator=(const ThreadPoolRunner&) = delete;

  Ticket submit(RolloutRequest request) override;
  RolloutGroup collect(Ticket ticket) override;
  void cancel(Ticket ticket) override;
  std::size_t peak_running() const override { return peak_.load(); }

 private:
  struct Job {
    RolloutRequest request;
    std::stop_source stop;
    std::promise<std::optional<RolloutGroup>> promise;
    std::future<std::optional<RolloutGroup>> result;
  };

  void work(std::stop_token token);

  std::mutex mutex_;
  std::condition_variable_any ready_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::unordered_map<Ticket, std::shared_ptr<Job>> jobs_;
  Ticket next_ = 0;
  std::atomic<std::size_t> running_{0};
  std::atomic<std::size_t> peak_{0};
  std::vector<std::jthread> workers_;
};

std::unique_ptr<RolloutRunner> make_runner(ExecutionMode mode, std::size_t max_concurrency);

/// How prompts with equal visit counts are ordered for dispatch.
enum class TieBreak {
  SeededShuffle,  // per-step shuffle keyed by the run seed
  PoolOrder,      // position in the pool (static curricula)
};

struct FillStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t cancelled = 0;
  /// Rollouts of completed groups, accepted or rejected.
  std::size_t rollouts = 0;
  /// Rollouts already generated by cancelled jobs when they were stopped.
  std::size_t cancelled_rollouts = 0;
  std::size_t max_in_flight = 0;
  /// Pool indices in dispatch order, including cancelled jobs.
  std::vector<std::size_t> dispatch_order;
  std::vector<RolloutGroup> rejected_groups;
};

struct FillOutcome {
  TrainBatch batch;
  FillStats stats;
};

/// Assembles one training batch of exactly N accepted groups.
///
/// Prompts are dispatched in ascending visit-count order with at most C_max
/// jobs in flight. Completions are committed in simulated finish-time order,
/// so sequential and threaded runners produce the same batch. Each completed
/// job bumps its prompt's visit count; the moment N groups are accepted the
/// remaining jobs are cancelled and leave visit counts untouched. A full pass
/// over the pool with fewer than N acceptances yields an underfilled batch,
/// and with none at all throws PoolExhausted.
FillOutcome fill_batch(SimState& state, const BatchSpec& spec, const FilterPolicy& filter,
                       RolloutRunner& runner, TieBreak tie_break = TieBreak::SeededShuffle);

/// Estimates each task's pass rate under `proxy` with G rollouts and keeps the
/// tasks the filter accepts, preserving pool order. Throws if none survive.
TaskPool offline_curation(const TaskPool& pool, const SimPolicy& proxy, const FilterPolicy& filter,
                          std::size_t group_size, std::uint64_t seed);

/// Reorders the pool by descending proxy pass rate (easy first). Ties keep
/// pool order.
TaskPool offline_schedule(const TaskPool& pool, const SimPolicy& proxy, std::size_t group_size,
                          std::uint64_t seed);

struct StepRecord {
  std::uint64_t step = 0;
  std::uint64_t iteration = 0;
  double ability = 0.0;
  double val_acc = 0.0;
  double mean_pass = 0.0;
  double mean_difficulty = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t cancelled = 0;
  std::size_t rollouts = 0;
  std::size_t cancelled_rollouts = 0;
  std::size_t max_in_flight = 0;
  bool underfilled = false;
  std::vector<std::size_t> visit_histogram;

  bool operator==(const StepRecord&) const = default;
};

struct RunLog {
  std::vector<StepRecord> steps;
  double initial_val_acc = 0.0;
  /// Completed groups by difficulty category, indexed by DifficultyCategory.
  std::array<std::size_t, 5> category_counts{};
  /// Mean exact Bernoulli reverse KL at the empirical pass rate over accepted groups.
  double mean_accepted_kl = 0.0;
  /// Set when the run aborted; `steps` then holds the completed prefix.
  std::optional<std::string> error;

  std::size_t total_rollouts() const;
  /// Rollouts spent on rejected groups plus partial work of cancelled jobs.
  std::size_t wasted_rollouts() const;
  double final_val_acc() const;
  double max_val_acc() const;
  /// 1-based step index of the first step with val_acc >= target.
  std::optional<std::uint64_t> steps_to_target(double target) const;

  bool operator==(const RunLog&) const = default;
};

/// Runs I iterations of M steps: fill_batch, advantages, apply_update, record.
/// Visit counts reset at each iteration boundary. Errors end the run early and
/// are reported in RunLog::error.
RunLog run_training(const ExperimentConfig& config);

/// Initial simulator state for a config: pool (generated or loaded), policy
/// and seed, before any strategy preprocessing.
SimState initial_state(const ExperimentConfig& config);

}  // namespace odf
