#include "odf/orchestrator.hpp"

#include <algorithm>
#include <exception>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "odf/errors.hpp"
#include "odf/learnability.hpp"
#include "odf/random.hpp"

namespace odf {

void BatchSpec::validate() const {
  if (batch_size < 1) throw std::invalid_argument("BatchSpec: N must be >= 1");
  if (group_size < 2) throw std::invalid_argument("BatchSpec: G must be >= 2");
  if (max_concurrency < 1) throw std::invalid_argument("BatchSpec: C_max must be >= 1");
}

// --- runners ---------------------------------------------------------------

RolloutRunner::Ticket SequentialRunner::submit(RolloutRequest request) {
  const Ticket t = next_++;
  pending_.emplace(t, std::move(request));
  return t;
}

RolloutGroup SequentialRunner::collect(Ticket ticket) {
  auto it = pending_.find(ticket);
  if (it == pending_.end()) throw std::logic_error("SequentialRunner: unknown ticket");
  RolloutRequest request = std::move(it->second);
  pending_.erase(it);
  peak_ = std::max<std::size_t>(peak_, 1);
  return *execute_rollout(request);
}

void SequentialRunner::cancel(Ticket ticket) { pending_.erase(ticket); }

ThreadPoolRunner::ThreadPoolRunner(std::size_t workers) {
  workers = std::max<std::size_t>(workers, 1);
  workers_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) {
    workers_.emplace_back([this](std::stop_token token) { work(token); });
  }
}

ThreadPoolRunner::~ThreadPoolRunner() {
  for (auto& w : workers_) w.request_stop();
  ready_.notify_all();
  workers_.clear();
}

void ThreadPoolRunner::work(std::stop_token token) {
  while (true) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mutex_);
      if (!ready_.wait(lock, token, [this] { return !queue_.empty(); })) return;
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    if (job->stop.stop_requested()) {
      job->promise.set_value(std::nullopt);
      continue;
    }
    const std::size_t now = ++running_;
    std::size_t peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
    // Leave the running set before publishing, so a waiting collector never
    // sees this job as still running alongside its successor.
    std::optional<RolloutGroup> result;
    std::exception_ptr error;
    try {
      result = execute_rollout(job->request, job->stop.get_token());
    } catch (...) {
      error = std::current_exception();
    }
    --running_;
    if (error) {
      job->promise.set_exception(error);
    } else {
      job->promise.set_value(std::move(result));
    }
  }
}

RolloutRunner::Ticket ThreadPoolRunner::submit(RolloutRequest request) {
  auto job = std::make_shared<Job>();
  job->request = std::move(request);
  job->result = job->promise.get_future();
  Ticket t;
  {
    std::lock_guard lock(mutex_);
    t = next_++;
    jobs_.emplace(t, job);
    queue_.push_back(std::move(job));
  }
  ready_.notify_one();
  return t;
}

RolloutGroup ThreadPoolRunner::collect(Ticket ticket) {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(ticket);
    if (it == jobs_.end()) throw std::logic_error("ThreadPoolRunner: unknown ticket");
    job = std::move(it->second);
    jobs_.erase(it);
  }
  auto group = job->result.get();
  if (!group) throw std::logic_error("ThreadPoolRunner: collected a stopped job");
  return std::move(*group);
}

void ThreadPoolRunner::cancel(Ticket ticket) {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(ticket);
    if (it == jobs_.end()) return;
    job = std::move(it->second);
    jobs_.erase(it);
  }
  job->stop.request_stop();
  job->result.wait();
}

std::unique_ptr<RolloutRunner> make_runner(ExecutionMode mode, std::size_t max_concurrency) {
  if (mode == ExecutionMode::Sequential) return std::make_unique<SequentialRunner>();
  const std::size_t hw = std::max(2u, std::thread::hardware_concurrency());
  return std::make_unique<ThreadPoolRunner>(std::min(max_concurrency, static_cast<std::size_t>(hw)));
}

// --- batch assembly ----------------------------------------------------------

namespace {

/// Simulated generation time of one job, in units of one rollout. Drawn from
/// its own stream so it never depends on the rewards.
double simulated_duration(const RolloutRequest& r) {
  auto rng = derive_stream(r.seed, "latency", {r.step, stable_hash(r.task_id), r.visit_index});
  return static_cast<double>(r.group_size) * (0.5 + uniform01(rng));
}

std::vector<std::size_t> dispatch_queue(const SimState& state, TieBreak tie_break) {
  const TaskPool& pool = state.pool;
  std::vector<std::size_t> order(pool.size());
  std::vector<std::uint64_t> tie(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    order[i] = i;
    tie[i] = tie_break == TieBreak::SeededShuffle
                 ? stream_key(state.seed, "order", {state.step, stable_hash(pool.task(i).id)})
                 : i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto va = pool.visit_count(a), vb = pool.visit_count(b);
    if (va != vb) return va < vb;
    if (tie[a] != tie[b]) return tie[a] < tie[b];
    return a < b;
  });
  return order;
}

struct InFlight {
  std::uint64_t seq;
  std::size_t task;
  double start;
  double finish;
  RolloutRunner::Ticket ticket;
};

struct FinishesLater {
  bool operator()(const InFlight& a, const InFlight& b) const {
    if (a.finish != b.finish) return a.finish > b.finish;
    return a.seq > b.seq;
  }
};

}  // namespace

FillOutcome fill_batch(SimState& state, const BatchSpec& spec, const FilterPolicy& filter,
                       RolloutRunner& runner, TieBreak tie_break) {
  spec.validate();
  if (state.pool.empty()) throw std::invalid_argument("fill_batch: empty task pool");

  FillOutcome out;
  out.batch.step = state.step;
  FillStats& stats = out.stats;
  const auto queue = dispatch_queue(state, tie_break);
  std::priority_queue<InFlight, std::vector<InFlight>, FinishesLater> in_flight;
  std::size_t cursor = 0;
  std::uint64_t seq = 0;
  double now = 0.0;

  while (out.batch.groups.size() < spec.batch_size) {
    while (in_flight.size() < spec.max_concurrency && cursor < queue.size()) {
      const std::size_t task = queue[cursor++];
      RolloutRequest request = make_rollout_request(state, task, spec.group_size);
      const double duration = simulated_duration(request);
      in_flight.push({seq++, task, now, now + duration, runner.submit(std::move(request))});
      stats.dispatch_order.push_back(task);
    }
    stats.max_in_flight = std::max(stats.max_in_flight, in_flight.size());
    if (in_flight.empty()) break;

    const InFlight job = in_flight.top();
    in_flight.pop();
    now = job.finish;
    RolloutGroup group = runner.collect(job.ticket);
    state.pool.increment_visit(job.task);
    stats.rollouts += group.rewards.size();
    if (filter.accept(group.pass_rate)) {
      out.batch.groups.push_back(std::move(group));
      ++stats.accepted;
    } else {
      stats.rejected_groups.push_back(std::move(group));
      ++stats.rejected;
    }
  }

  while (!in_flight.empty()) {
    const InFlight job = in_flight.top();
    in_flight.pop();
    runner.cancel(job.ticket);
    ++stats.cancelled;
    const double progress = (now - job.start) / (job.finish - job.start);
    stats.cancelled_rollouts +=
        static_cast<std::size_t>(std::floor(progress * static_cast<double>(spec.group_size)));
  }

  if (out.batch.groups.empty()) {
    throw PoolExhausted("pool exhausted: no prompt passed the filter " + filter.describe() +
                        " in a full pass over " + std::to_string(state.pool.size()) + " prompts");
  }
  out.batch.underfilled = out.batch.groups.size() < spec.batch_size;
  return out;
}

// --- offline baselines ---------------------------------------------------------

namespace {

std::vector<double> proxy_pass_rates(const TaskPool& pool, const SimPolicy& proxy,
                                     std::size_t group_size, std::uint64_t seed) {
  if (group_size < 2) throw std::invalid_argument("offline filtering: G must be >= 2");
  std::vector<double> rates(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    RolloutRequest request;
    request.task_id = pool.task(i).id;
    request.difficulty = pool.task(i).difficulty;
    request.ability = proxy.ability;
    request.seed = seed;
    request.group_size = group_size;
    request.stream = "proxy";
    rates[i] = execute_rollout(request)->pass_rate;
  }
  return rates;
}

}  // namespace

TaskPool offline_curation(const TaskPool& pool, const SimPolicy& proxy, const FilterPolicy& filter,
                          std::size_t group_size, std::uint64_t seed) {
  const auto rates = proxy_pass_rates(pool, proxy, group_size, seed);
  std::vector<Task> kept;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (filter.accept(rates[i])) kept.push_back(pool.task(i));
  }
  if (kept.empty()) {
    throw PoolExhausted("offline curation kept no prompts for filter " + filter.describe());
  }
  return TaskPool(std::move(kept));
}

TaskPool offline_schedule(const TaskPool& pool, const SimPolicy& proxy, std::size_t group_size,
                          std::uint64_t seed) {
  const auto rates = proxy_pass_rates(pool, proxy, group_size, seed);
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rates[a] > rates[b]; });
  std::vector<Task> tasks;
  tasks.reserve(order.size());
  for (std::size_t i : order) tasks.push_back(pool.task(i));
  return TaskPool(std::move(tasks));
}

// --- run log -----------------------------------------------------------------------

std::size_t RunLog::total_rollouts() const {
  std::size_t total = 0;
  for (const auto& s : steps) total += s.rollouts + s.cancelled_rollouts;
  return total;
}

std::size_t RunLog::wasted_rollouts() const {
  std::size_t total = 0;
  for (const auto& s : steps) {
    const std::size_t completed = s.accepted + s.rejected;
    if (completed > 0) total += s.rollouts / completed * s.rejected;
    total += s.cancelled_rollouts;
  }
  return total;
}

double RunLog::final_val_acc() const { return steps.empty() ? initial_val_acc : steps.back().val_acc; }

double RunLog::max_val_acc() const {
  double best = initial_val_acc;
  for (const auto& s : steps) best = std::max(best, s.val_acc);
  return best;
}

std::optional<std::uint64_t> RunLog::steps_to_target(double target) const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].val_acc >= target) return i + 1;
  }
  return std::nullopt;
}

// --- training loop -------------------------------------------------------------------

SimState initial_state(const ExperimentConfig& config) {
  SimState state;
  state.pool = config.task_file.empty()
                   ? TaskPool::generate(config.pool_size, config.difficulty_mean,
                                        config.difficulty_std, config.seed)
                   : TaskPool::load(config.task_file);
  if (state.pool.empty()) throw ConfigError("task pool is empty");
  state.policy = {config.initial_ability, config.eta, config.dynamics};
  state.seed = config.seed;
  return state;
}

RunLog run_training(const ExperimentConfig& config) {
  config.validate();
  RunLog log;
  const auto holdout =
      make_holdout(config.holdout_size, config.difficulty_mean, config.difficulty_std, config.seed);
  SimState state = initial_state(config);
  log.initial_val_acc = validation_accuracy(state.policy, holdout);

  FilterPolicy filter = online_filter(config.strategy);
  TieBreak tie_break = TieBreak::SeededShuffle;
  const SimPolicy proxy_base = state.policy;
  try {
    if (const auto* c = std::get_if<strategy::OfflineCuration>(&config.strategy)) {
      SimPolicy proxy = proxy_base;
      proxy.ability = c->proxy_ability;
      state.pool = offline_curation(state.pool, proxy, curation_filter(*c), config.group_size, config.seed);
    } else if (const auto* s = std::get_if<strategy::OfflineSchedule>(&config.strategy)) {
      SimPolicy proxy = proxy_base;
      proxy.ability = s->proxy_ability;
      state.pool = offline_schedule(state.pool, proxy, config.group_size, config.seed);
      tie_break = TieBreak::PoolOrder;
    }
  } catch (const std::exception& e) {
    log.error = e.what();
    return log;
  }

  const BatchSpec spec{config.batch_size, config.group_size, config.max_concurrency};
  const Temperature temp(config.beta);
  auto runner = make_runner(config.execution, config.max_concurrency);
  double kl_sum = 0.0;
  std::size_t kl_count = 0;

  for (std::size_t it = 0; it < config.iterations; ++it) {
    // Iteration boundary: the reference policy is reset to the current one
    // and every prompt becomes unvisited again.
    state.iteration = it;
    state.pool.reset_visits();
    for (std::size_t m = 0; m < config.steps_per_iteration; ++m) {
      FillOutcome fill;
      try {
        fill = fill_batch(state, spec, filter, *runner, tie_break);
      } catch (const std::exception& e) {
        log.error = e.what();
        return log;
      }
      const TrainBatch& batch = fill.batch;
      double pass_sum = 0.0;
      for (const auto& g : batch.groups) {
        pass_sum += g.pass_rate;
        kl_sum += exact_reverse_kl(RewardDistribution::bernoulli(g.pass_rate), temp);
        ++kl_count;
        ++log.category_counts[static_cast<std::size_t>(categorize(g.pass_rate, config.epsilon))];
      }
      for (const auto& g : fill.stats.rejected_groups) {
        ++log.category_counts[static_cast<std::size_t>(categorize(g.pass_rate, config.epsilon))];
      }
      apply_update(state, batch);

      StepRecord rec;
      rec.step = state.step;
      rec.iteration = it;
      rec.ability = state.policy.ability;
      rec.val_acc = validation_accuracy(state.policy, holdout);
      rec.mean_pass = pass_sum / static_cast<double>(batch.groups.size());
      rec.mean_difficulty = 1.0 - rec.mean_pass;
      rec.accepted = fill.stats.accepted;
      rec.rejected = fill.stats.rejected;
      rec.cancelled = fill.stats.cancelled;
      rec.rollouts = fill.stats.rollouts;
      rec.cancelled_rollouts = fill.stats.cancelled_rollouts;
      rec.max_in_flight = fill.stats.max_in_flight;
      rec.underfilled = batch.underfilled;
      rec.visit_histogram = state.pool.visit_histogram();
      log.steps.push_back(std::move(rec));
    }
  }
  log.mean_accepted_kl = kl_count == 0 ? 0.0 : kl_sum / static_cast<double>(kl_count);
  return log;
}

}  // namespace odf
