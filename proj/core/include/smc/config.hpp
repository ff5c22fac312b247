#ifndef SMC_CONFIG_HPP
#define SMC_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "smc/reliability.hpp"
#include "smc/simulation.hpp"

namespace smc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string app;
  std::int64_t n = 0;
  std::vector<WorkerSpec> workers;
  int masters_k = 1;
  GrainMode grain_mode = GrainMode::FixedGrain;
  std::int64_t grain = 1;
  FaultPlan fault_plan;
  std::uint64_t run_seed = 0;
  Tick tick_budget = 0;              // subticks
  std::optional<Tick> lease_len;     // subticks
  std::string output_path;
};

// Parses and validates a run config. Durations in the JSON document are in
// configured ticks and are scaled to subticks here. An absent seed is an
// error, never an implicit default. Throws ConfigError naming the offending
// field.
RunConfig parse_run_config(const std::string& json_text);
std::string serialize_run_config(const RunConfig& cfg);

ReliabilityProfile parse_reliability_profile(const std::string& json_text);
std::string serialize_reliability_profile(const ReliabilityProfile& p);

SmcRunParams to_run_params(const RunConfig& cfg, const Application& app);

const char* grain_mode_name(GrainMode m);

}  // namespace smc

#endif
