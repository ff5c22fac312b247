#ifndef SMC_GRANULARITY_HPP
#define SMC_GRANULARITY_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "smc/time.hpp"

namespace smc {

struct TaskRange {
  std::int64_t task_id = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // exclusive
  std::int64_t units() const { return hi - lo; }
};

class InvalidGrain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class InvalidPartition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ceil(N/g) tasks covering [0, N) disjointly; the last task may be smaller.
std::vector<TaskRange> decompose(std::int64_t n, std::int64_t grain);

// The naive N/P split: P tasks, the first N mod P of size ceil(N/P), the
// rest floor(N/P). Task i is pinned to worker i by the StaticNP run mode.
std::vector<TaskRange> static_np_partition(std::int64_t n, std::int64_t p);

struct WorkerProfile {
  double speed = 1.0;     // work units per tick
  Tick link_delay = 0;    // subticks, one way
};

// Independent greedy list-scheduling oracle for cross-checking simulated
// makespans on small instances. Workers request work when free; the worker
// whose request would arrive at the space first (ties by index) receives
// the next task. Per-task cost on worker w: 2*delay + ceil-scaled compute;
// the finished result lands one more delay later.
Tick oracle_makespan(const std::vector<std::int64_t>& task_units,
                     const std::vector<WorkerProfile>& workers);

// Exhaustive minimum over all assignments of `n_tasks` unit tasks to two
// workers (tasks on a worker run back to back).
Tick exhaustive_min_makespan(int n_tasks, std::int64_t units_per_task,
                             const WorkerProfile& w0, const WorkerProfile& w1);

}  // namespace smc

#endif
