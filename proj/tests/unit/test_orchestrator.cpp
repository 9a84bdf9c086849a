#include <algorithm>
#include <cmath>
#include <random>
#include <numeric>
#include <set>

#include <stdexcept>

#include "doctest.h"
#include "odf/errors.hpp"
#include "odf/orchestrator.hpp"
#include "odf/random.hpp"

using namespace odf;

namespace {

constexpr double kAlwaysPass = -1e4;
constexpr double kNeverPass = 1e4;

SimState make_state(std::vector<Task> tasks, std::uint64_t seed = 3) {
  SimState s;
  s.pool = TaskPool(std::move(tasks));
  s.policy = {0.0, 0.05, Dynamics::VarianceDriven};
  s.seed = seed;
  return s;
}

std::set<std::string> ids(const TrainBatch& b) {
  std::set<std::string> out;
  for (const auto& g : b.groups) out.insert(g.prompt_id);
  return out;
}

std::vector<std::uint32_t> visits(const TaskPool& pool) {
  std::vector<std::uint32_t> v;
  for (std::size_t i = 0; i < pool.size(); ++i) v.push_back(pool.visit_count(i));
  return v;
}

ExperimentConfig small_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.pool_size = 300;
  c.steps_per_iteration = 15;
  c.iterations = 2;
  c.batch_size = 8;
  c.group_size = 8;
  c.max_concurrency = 6;
  c.holdout_size = 64;
  c.strategy = strategy::Balanced{0.2, 0.8};
  return c;
}

}  // namespace

TEST_CASE("fill_batch keeps only intermediate prompts") {
  SimState s = make_state({{"zero", kNeverPass}, {"half1", 0.0}, {"half2", 0.0}, {"one", kAlwaysPass}});
  SequentialRunner runner;
  const auto out = fill_batch(s, {2, 4096, 4}, FilterPolicy::make(0.2, 0.8, false, false), runner);
  CHECK(ids(out.batch) == std::set<std::string>{"half1", "half2"});
  CHECK_FALSE(out.batch.underfilled);
}

TEST_CASE("plain filter accepts every prompt") {
  SimState s = make_state({{"a", -1.0}, {"b", 0.0}, {"c", 1.0}, {"d", 2.0}});
  SequentialRunner runner;
  const auto out = fill_batch(s, {4, 8, 4}, FilterPolicy::plain(), runner);
  CHECK(out.batch.groups.size() == 4);
  CHECK(ids(out.batch) == std::set<std::string>{"a", "b", "c", "d"});
  CHECK(out.stats.rejected == 0);
  CHECK(visits(s.pool) == std::vector<std::uint32_t>{1, 1, 1, 1});
}

TEST_CASE("a filter nothing can pass exhausts the pool") {
  SimState s = make_state({{"a", kAlwaysPass}, {"b", kAlwaysPass}, {"c", kAlwaysPass}});
  SequentialRunner runner;
  try {
    fill_batch(s, {2, 16, 2}, FilterPolicy::make(0.4, 0.6, false, false), runner);
    FAIL("expected PoolExhausted");
  } catch (const PoolExhausted& e) {
    CHECK(std::string(e.what()).find("(0.4, 0.6)") != std::string::npos);
  }
}

TEST_CASE("a partial pass returns an underfilled batch") {
  SimState s = make_state({{"a", kAlwaysPass}, {"b", 0.0}, {"c", kNeverPass}, {"d", 0.0}, {"e", kAlwaysPass}});
  SequentialRunner runner;
  const auto out = fill_batch(s, {4, 256, 2}, FilterPolicy::make(0.1, 0.9, false, false), runner);
  CHECK(out.batch.underfilled);
  CHECK(ids(out.batch) == std::set<std::string>{"b", "d"});
  CHECK(out.stats.cancelled == 0);
  CHECK(visits(s.pool) == std::vector<std::uint32_t>{1, 1, 1, 1, 1});
}

TEST_CASE("batch assembly invariants") {
  auto rng = derive_stream(21, "test-fill");
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Task> tasks;
    const std::size_t n = 20 + rng() % 80;
    std::normal_distribution<double> normal(0.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) tasks.push_back({"t" + std::to_string(i), normal(rng)});
    SimState s = make_state(std::move(tasks), rng());
    // Start from uneven visit counts so ordering matters.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint64_t k = rng() % 3; k > 0; --k) s.pool.increment_visit(i);
    }
    const BatchSpec spec{1 + rng() % 8, 2 + rng() % 15, 1 + rng() % 10};
    const double lo = uniform01(rng) * 0.5;
    const auto filter = FilterPolicy::make(lo, lo + uniform01(rng) * 0.5, rng() % 2 == 0, rng() % 2 == 0);
    const auto before = visits(s.pool);
    SequentialRunner runner;
    FillOutcome out;
    try {
      out = fill_batch(s, spec, filter, runner);
    } catch (const PoolExhausted&) {
      CHECK(visits(s.pool) != before);
      continue;
    }

    if (!out.batch.underfilled) CHECK(out.batch.groups.size() == spec.batch_size);
    CHECK(out.batch.groups.size() <= spec.batch_size);
    for (const auto& g : out.batch.groups) CHECK(filter.accept(g.pass_rate));
    for (const auto& g : out.stats.rejected_groups) CHECK_FALSE(filter.accept(g.pass_rate));
    CHECK(out.stats.max_in_flight <= spec.max_concurrency);

    // Completed jobs bump visit counts by one; cancelled jobs leave them alone.
    const auto after = visits(s.pool);
    std::size_t bumped = 0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(after[i] - before[i] <= 1);
      bumped += after[i] - before[i];
    }
    CHECK(bumped == out.stats.accepted + out.stats.rejected);
    CHECK(out.stats.dispatch_order.size() == bumped + out.stats.cancelled);

    // Each dispatched prompt had the minimal visit count among those not yet dispatched.
    std::vector<bool> dispatched(n, false);
    for (std::size_t task : out.stats.dispatch_order) {
      CHECK_FALSE(dispatched[task]);
      for (std::size_t j = 0; j < n; ++j) {
        if (!dispatched[j]) CHECK(before[task] <= before[j]);
      }
      dispatched[task] = true;
    }
  }
}

TEST_CASE("cancelled jobs are discarded once the batch is full") {
  std::vector<Task> tasks;
  for (int i = 0; i < 40; ++i) tasks.push_back({"t" + std::to_string(i), 0.0});
  SimState s = make_state(std::move(tasks));
  SequentialRunner runner;
  const auto out = fill_batch(s, {4, 8, 10}, FilterPolicy::plain(), runner);
  CHECK(out.batch.groups.size() == 4);
  CHECK(out.stats.accepted == 4);
  // The in-flight set is topped back up to C_max after each completion, so
  // the last acceptance leaves C_max - 1 jobs to cancel.
  CHECK(out.stats.cancelled == 9);
  CHECK(out.stats.dispatch_order.size() == 13);
  std::size_t visited = 0;
  for (auto v : visits(s.pool)) visited += v;
  CHECK(visited == 4);
  std::set<std::size_t> accepted;
  for (const auto& g : out.batch.groups) accepted.insert(*s.pool.index_of(g.prompt_id));
  for (std::size_t task : out.stats.dispatch_order) {
    if (!accepted.count(task)) CHECK(s.pool.visit_count(task) == 0);
  }
}

TEST_CASE("threaded and sequential runners assemble identical batches") {
  auto rng = derive_stream(22, "test-modes");
  for (int trial = 0; trial < 20; ++trial) {
    const auto pool = TaskPool::generate(200, 0.0, 2.0, rng());
    SimState a = make_state({}, rng());
    a.pool = pool;
    SimState b = a;
    const BatchSpec spec{1 + rng() % 12, 2 + rng() % 15, 1 + rng() % 12};
    const auto filter = FilterPolicy::make(0.2, 0.8, false, false);
    SequentialRunner seq;
    ThreadPoolRunner threaded(4);
    for (int step = 0; step < 5; ++step) {
      const auto x = fill_batch(a, spec, filter, seq);
      const auto y = fill_batch(b, spec, filter, threaded);
      CHECK(x.batch == y.batch);
      CHECK(x.stats.dispatch_order == y.stats.dispatch_order);
      CHECK(x.stats.cancelled == y.stats.cancelled);
      CHECK(x.stats.cancelled_rollouts == y.stats.cancelled_rollouts);
      CHECK(a == b);
      apply_update(a, x.batch);
      apply_update(b, y.batch);
    }
    CHECK(threaded.peak_running() <= spec.max_concurrency);
  }
}

TEST_CASE("offline_curation") {
  TaskPool pool = TaskPool::generate(300, 0.0, 2.0, 5);
  SimPolicy proxy{-2.0, 0.05, Dynamics::VarianceDriven};

  CHECK_THROWS_AS(offline_curation(pool, {1e6, 0.05, Dynamics::VarianceDriven},
                                   FilterPolicy::make(0.2, 0.8, false, false), 16, 1),
                  PoolExhausted);

  const auto filter = FilterPolicy::make(0.2, 0.8, false, false);
  const auto curated = offline_curation(pool, proxy, filter, 16, 1);
  CHECK(curated.size() > 0);
  CHECK(curated.size() < pool.size());
  // Independently re-estimate the proxy pass rates with the same streams.
  for (const auto& task : curated.tasks()) {
    RolloutRequest request;
    request.task_id = task.id;
    request.difficulty = task.difficulty;
    request.ability = proxy.ability;
    request.seed = 1;
    request.group_size = 16;
    request.stream = "proxy";
    const double p = execute_rollout(request)->pass_rate;
    CHECK(p >= 0.2);
    CHECK(p <= 0.8);
  }
  // Relative order is preserved.
  std::size_t last = 0;
  for (const auto& task : curated.tasks()) {
    const std::size_t idx = *pool.index_of(task.id);
    CHECK(idx >= last);
    last = idx;
  }

  const auto everything = offline_curation(pool, proxy, FilterPolicy::plain(), 16, 1);
  CHECK(everything == pool);
}

TEST_CASE("offline_schedule") {
  SimPolicy proxy{0.0, 0.05, Dynamics::VarianceDriven};
  // Difficulties chosen so proxy pass rates are ~0.9, ~0.1, ~0.5 with G large.
  TaskPool pool({{"p90", -std::log(9.0)}, {"p10", std::log(9.0)}, {"p50", 0.0}});
  const auto ordered = offline_schedule(pool, proxy, 4096, 2);
  CHECK(ordered.task(0).id == "p90");
  CHECK(ordered.task(1).id == "p50");
  CHECK(ordered.task(2).id == "p10");

  TaskPool flat({{"x", kAlwaysPass}, {"y", kAlwaysPass}, {"z", kAlwaysPass}});
  CHECK(offline_schedule(flat, proxy, 16, 2) == flat);
  TaskPool single({{"only", 0.3}});
  CHECK(offline_schedule(single, proxy, 16, 2) == single);
}

TEST_CASE("run_training") {
  SUBCASE("zero steps yields an empty log") {
    ExperimentConfig c = small_config(1);
    c.steps_per_iteration = 0;
    const auto log = run_training(c);
    CHECK(log.steps.empty());
    CHECK_FALSE(log.error.has_value());
    CHECK(log.final_val_acc() == log.initial_val_acc);
  }
  SUBCASE("default shape is N = G = 16") {
    ExperimentConfig c;
    c.steps_per_iteration = 3;
    const auto log = run_training(c);
    REQUIRE(log.steps.size() == 3);
    for (const auto& s : log.steps) {
      CHECK(s.accepted == 16);
      CHECK(s.rollouts == 16 * (s.accepted + s.rejected));
    }
  }
  SUBCASE("rows are ordered and visits reset per iteration") {
    const auto c = small_config(2);
    const auto log = run_training(c);
    REQUIRE(log.steps.size() == 30);
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      CHECK(log.steps[i].step == i + 1);
      CHECK(log.steps[i].iteration == i / 15);
    }
    // First step of the second iteration only sees that step's visits.
    const auto& hist = log.steps[15].visit_histogram;
    const std::size_t visited = c.pool_size - hist[0];
    CHECK(visited == log.steps[15].accepted + log.steps[15].rejected);
  }
  SUBCASE("deterministic and mode independent") {
    auto c = small_config(3);
    const auto a = run_training(c);
    CHECK(a == run_training(c));
    c.execution = ExecutionMode::Concurrent;
    CHECK(a == run_training(c));
  }
  SUBCASE("pool exhaustion aborts with a partial log") {
    auto c = small_config(4);
    c.pool_size = 5;
    c.strategy = strategy::Balanced{0.45, 0.55};
    c.group_size = 2;
    const auto log = run_training(c);
    REQUIRE(log.error.has_value());
    CHECK(log.error->find("(0.45, 0.55)") != std::string::npos);
  }
  SUBCASE("plain equals the inclusive [0, 1] filter step for step") {
    CHECK(online_filter(strategy::Plain{}) == FilterPolicy::make(0, 1, true, true));
    const auto c = small_config(5);
    SimState a = initial_state(c), b = initial_state(c);
    SequentialRunner r1, r2;
    const BatchSpec spec{c.batch_size, c.group_size, c.max_concurrency};
    for (int i = 0; i < 10; ++i) {
      const auto x = fill_batch(a, spec, online_filter(strategy::Plain{}), r1);
      const auto y = fill_batch(b, spec, FilterPolicy::make(0, 1, true, true), r2);
      CHECK(x.batch == y.batch);
      apply_update(a, x.batch);
      apply_update(b, y.batch);
    }
    CHECK(a == b);
  }
  SUBCASE("offline strategies train") {
    auto c = small_config(6);
    c.strategy = strategy::OfflineSchedule{-2.0};
    const auto sched = run_training(c);
    CHECK_FALSE(sched.error.has_value());
    CHECK(sched.steps.size() == 30);
    c.strategy = strategy::OfflineCuration{0.2, 0.8, -2.0};
    const auto cur = run_training(c);
    CHECK_FALSE(cur.error.has_value());
    c.strategy = strategy::OfflineCuration{0.2, 0.8, 1e6};
    CHECK(run_training(c).error.has_value());
  }
}

TEST_CASE("RunLog summaries") {
  RunLog log;
  log.initial_val_acc = 0.1;
  CHECK(log.max_val_acc() == 0.1);
  StepRecord s1;
  s1.val_acc = 0.3;
  s1.accepted = 2;
  s1.rejected = 1;
  s1.rollouts = 12;
  s1.cancelled_rollouts = 3;
  StepRecord s2 = s1;
  s2.val_acc = 0.5;
  log.steps = {s1, s2};
  CHECK(log.total_rollouts() == 30);
  CHECK(log.wasted_rollouts() == 14);
  CHECK(log.steps_to_target(0.4) == 2u);
  CHECK(log.steps_to_target(0.3) == 1u);
  CHECK_FALSE(log.steps_to_target(0.6).has_value());
}
