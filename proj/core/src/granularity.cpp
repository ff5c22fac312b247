#include "smc/granularity.hpp"

#include <algorithm>

namespace smc {

std::vector<TaskRange> decompose(std::int64_t n, std::int64_t grain) {
  if (grain < 1 || grain > n) throw InvalidGrain("grain must satisfy 1 <= g <= N");
  std::vector<TaskRange> tasks;
  tasks.reserve(static_cast<std::size_t>((n + grain - 1) / grain));
  std::int64_t id = 0;
  for (std::int64_t lo = 0; lo < n; lo += grain) {
    tasks.push_back(TaskRange{id++, lo, std::min(lo + grain, n)});
  }
  return tasks;
}

std::vector<TaskRange> static_np_partition(std::int64_t n, std::int64_t p) {
  if (p < 1 || p > n) throw InvalidPartition("partition requires N >= P >= 1");
  const std::int64_t big = (n + p - 1) / p;
  const std::int64_t small = n / p;
  const std::int64_t n_big = n % p;
  std::vector<TaskRange> tasks;
  tasks.reserve(static_cast<std::size_t>(p));
  std::int64_t lo = 0;
  for (std::int64_t i = 0; i < p; ++i) {
    const std::int64_t size = i < n_big ? big : small;
    tasks.push_back(TaskRange{i, lo, lo + size});
    lo += size;
  }
  return tasks;
}

Tick oracle_makespan(const std::vector<std::int64_t>& task_units,
                     const std::vector<WorkerProfile>& workers) {
  // avail[w] is the tick the worker sends its next request; the request
  // arrives avail + delay later. Ties on arrival go to the request that was
  // enqueued first (earlier send tick, then earlier previous assignment).
  std::vector<Tick> avail(workers.size(), 0);
  std::vector<std::size_t> last_assigned(workers.size());
  for (std::size_t w = 0; w < workers.size(); ++w) last_assigned[w] = w;
  std::size_t assign_seq = workers.size();
  Tick makespan = 0;
  for (std::int64_t units : task_units) {
    std::size_t best = 0;
    auto key = [&](std::size_t w) {
      return std::tuple(avail[w] + workers[w].link_delay, avail[w], last_assigned[w]);
    };
    for (std::size_t w = 1; w < workers.size(); ++w) {
      if (key(w) < key(best)) best = w;
    }
    const WorkerProfile& wp = workers[best];
    avail[best] += 2 * wp.link_delay + compute_duration(units, wp.speed);
    last_assigned[best] = assign_seq++;
    makespan = std::max(makespan, avail[best] + wp.link_delay);
  }
  return makespan;
}

Tick exhaustive_min_makespan(int n_tasks, std::int64_t units_per_task,
                             const WorkerProfile& w0, const WorkerProfile& w1) {
  const Tick c0 = 2 * w0.link_delay + compute_duration(units_per_task, w0.speed);
  const Tick c1 = 2 * w1.link_delay + compute_duration(units_per_task, w1.speed);
  Tick best = INT64_MAX;
  for (unsigned mask = 0; mask < (1u << n_tasks); ++mask) {
    const int k = __builtin_popcount(mask);  // tasks on w0
    Tick m0 = k > 0 ? k * c0 + w0.link_delay : 0;
    Tick m1 = n_tasks - k > 0 ? (n_tasks - k) * c1 + w1.link_delay : 0;
    best = std::min(best, std::max(m0, m1));
  }
  return best;
}

}  // namespace smc
