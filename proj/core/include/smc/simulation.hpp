#ifndef SMC_SIMULATION_HPP
#define SMC_SIMULATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smc/granularity.hpp"
#include "smc/runtime.hpp"
#include "smc/transport.hpp"

namespace smc {

enum class GrainMode { StaticNP, FixedGrain, Tuned };

struct SmcRunParams {
  const Application* app = nullptr;
  std::int64_t total_units = 0;
  std::vector<WorkerSpec> workers;
  int masters_k = 1;
  GrainMode grain_mode = GrainMode::FixedGrain;
  std::int64_t grain = 1;         // used by FixedGrain
  FaultPlan fault_plan;
  std::uint64_t run_seed = 0;
  Tick tick_budget = 0;           // subticks; 0 = a generous default
  Tick lease_len = 0;             // subticks; 0 = 4x mean task service time
};

// Pull-mode (or StaticNP-pinned) run over the tuple space with shadow-tuple
// retransmission and k redundant masters.
RunReport smc_run(const SmcRunParams& params);

enum class HaltCause { MessageLoss, WorkerCrash };

enum class VcStatus { Success, Halted };

struct VcRunOutcome {
  VcStatus status = VcStatus::Success;
  std::optional<HaltCause> halt_cause;
  Tick elapsed = 0;
  std::int64_t messages = 0;  // messages a fault-free run would send
};

// Virtual-circuit baseline: the same workload over per-worker persistent
// circuits with no retransmission discipline. The first lost message or
// crash touching an active circuit halts the whole application.
VcRunOutcome vc_run(const SmcRunParams& params);

// Fixed message count of a fault-free vc_run with `tasks` tasks.
std::int64_t vc_message_count(std::int64_t tasks);

}  // namespace smc

#endif
