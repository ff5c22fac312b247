#ifndef SMC_TUNE_HPP
#define SMC_TUNE_HPP

#include <string>
#include <vector>

#include "smc/simulation.hpp"

namespace smc {

struct EquilibriumMetric {
  double spread = 0.0;  // (max finish - min finish) / makespan, in [0, 1]
};

// Spread over workers that had at least one result accepted.
EquilibriumMetric measure_equilibrium(const RunReport& report);

struct TunePoint {
  std::int64_t grain = 0;
  Tick makespan = 0;
  double spread = 0.0;
};

struct TuneResult {
  std::int64_t best_grain = 0;
  std::vector<TunePoint> curve;
  double improvement_vs_np = 0.0;  // 1 - best_makespan / static_np_makespan
  Tick static_np_makespan = 0;
  double static_np_spread = 0.0;
};

// Sweeps grains {ceil(N/P), ceil(N/2P), ceil(N/4P), ..., 1} (deduplicated)
// in pull mode under identical seeds, plus one StaticNP baseline run.
// Ties on makespan go to the larger grain (fewer messages).
TuneResult tune(const Application& app, const std::vector<WorkerSpec>& workers,
                const FaultPlan& fault_plan, std::int64_t n,
                std::uint64_t run_seed, Tick tick_budget = 0);

std::string tune_csv(const TuneResult& r);

}  // namespace smc

#endif
