#include "smc/tune.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace smc {

EquilibriumMetric measure_equilibrium(const RunReport& report) {
  if (report.status != RunStatus::Success)
    throw std::invalid_argument("equilibrium is only defined for successful runs");
  if (report.per_worker_finish.size() < 2 || report.makespan <= 0) return {0.0};
  Tick lo = INT64_MAX, hi = INT64_MIN;
  for (const auto& [_, t] : report.per_worker_finish) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return {static_cast<double>(hi - lo) / static_cast<double>(report.makespan)};
}

TuneResult tune(const Application& app, const std::vector<WorkerSpec>& workers,
                const FaultPlan& fault_plan, std::int64_t n,
                std::uint64_t run_seed, Tick tick_budget) {
  const auto p = static_cast<std::int64_t>(workers.size());
  if (n < p || p < 1) throw InvalidPartition("tune requires N >= P >= 1");

  SmcRunParams params;
  params.app = &app;
  params.total_units = n;
  params.workers = workers;
  params.masters_k = 1;
  params.fault_plan = fault_plan;
  params.run_seed = run_seed;
  params.tick_budget = tick_budget;

  params.grain_mode = GrainMode::StaticNP;
  const RunReport np_report = smc_run(params);
  if (np_report.status != RunStatus::Success)
    throw std::runtime_error("StaticNP baseline run failed");

  std::vector<std::int64_t> grains;
  for (std::int64_t denom = p; ; denom *= 2) {
    const std::int64_t g = (n + denom - 1) / denom;
    if (grains.empty() || grains.back() != g) grains.push_back(g);
    if (g == 1) break;
  }

  TuneResult result;
  result.static_np_makespan = np_report.makespan;
  result.static_np_spread = measure_equilibrium(np_report).spread;

  params.grain_mode = GrainMode::FixedGrain;
  for (std::int64_t g : grains) {
    params.grain = g;
    const RunReport r = smc_run(params);
    if (r.status != RunStatus::Success)
      throw std::runtime_error("pull-mode run failed at grain " + std::to_string(g));
    result.curve.push_back(TunePoint{g, r.makespan, measure_equilibrium(r).spread});
  }

  const TunePoint* best = &result.curve.front();
  for (const TunePoint& pt : result.curve) {
    if (pt.makespan < best->makespan) best = &pt;  // ties keep the larger grain
  }
  result.best_grain = best->grain;
  result.improvement_vs_np =
      1.0 - static_cast<double>(best->makespan) /
                static_cast<double>(result.static_np_makespan);
  return result;
}

std::string tune_csv(const TuneResult& r) {
  std::string out = "grain,makespan,spread\n";
  char buf[128];
  for (const TunePoint& pt : r.curve) {
    std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f\n", static_cast<long long>(pt.grain),
                  to_config_ticks(pt.makespan), pt.spread);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "best,%lld,%.6f\n", static_cast<long long>(r.best_grain),
                r.improvement_vs_np);
  out += buf;
  return out;
}

}  // namespace smc
