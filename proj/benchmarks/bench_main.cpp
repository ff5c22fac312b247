#include <benchmark/benchmark.h>

#include "smc/simulation.hpp"
#include "smc/tuple_space.hpp"

using namespace smc;

namespace {

void BM_TupleSpacePutTakeComplete(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  for (auto _ : state) {
    TupleSpace space(42);
    for (TaskId i = 0; i < n; ++i) {
      Tuple t;
      t.key = TupleKey{"a", TupleKind::Task, i, 0};
      space.put(t);
    }
    const Pattern any{"a", TupleKind::Task, std::nullopt};
    for (TaskId i = 0; i < n; ++i) {
      auto taken = space.take(any, "w", 8, i);
      space.complete("a", taken->key.task_id, Bytes{1}, "w", i + 1);
    }
    benchmark::DoNotOptimize(space.snapshot());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_EventLoopThroughput(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  auto app = make_application("monte_carlo_pi", 7, n);
  for (auto _ : state) {
    SmcRunParams p;
    p.app = app.get();
    p.total_units = n;
    p.workers = {WorkerSpec{"w0", 1.0, 0}, WorkerSpec{"w1", 1.0, 0},
                 WorkerSpec{"w2", 1.0, 0}, WorkerSpec{"w3", 1.0, 0}};
    p.grain = 1;
    p.fault_plan.seed = 3;
    p.run_seed = 7;
    benchmark::DoNotOptimize(smc_run(p));
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_LossyRun(benchmark::State& state) {
  auto app = make_application("matmul", 9, 1024);
  for (auto _ : state) {
    SmcRunParams p;
    p.app = app.get();
    p.total_units = 1024;
    p.workers = {WorkerSpec{"w0", 1.0, 0}, WorkerSpec{"w1", 1.6, kTickScale}};
    p.grain = 32;
    p.fault_plan.seed = 11;
    p.fault_plan.msg_loss_prob = 0.05;
    p.run_seed = 9;
    p.tick_budget = 100000 * kTickScale;
    benchmark::DoNotOptimize(smc_run(p));
  }
}

}  // namespace

BENCHMARK(BM_TupleSpacePutTakeComplete)->Arg(256)->Arg(4096);
BENCHMARK(BM_EventLoopThroughput)->Arg(64)->Arg(512);
BENCHMARK(BM_LossyRun);

BENCHMARK_MAIN();
