#ifndef SMC_RUNTIME_HPP
#define SMC_RUNTIME_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smc/digest.hpp"
#include "smc/granularity.hpp"
#include "smc/time.hpp"
#include "smc/tuple_space.hpp"

namespace smc {

struct WorkerSpec {
  std::string worker_id;
  double speed_factor = 1.0;  // work units per tick
  Tick link_delay = 0;        // subticks, one way
};

struct MasterSpec {
  std::string master_id = "m";
  int redundancy = 1;  // k >= 1
};

// Figure-2 quadrants over deterministic / non-deterministic input and
// output. NonDetInDetOut is the sole class unsupported for redundant
// masters (checkpointing would be required).
enum class StabilityClass {
  DetInDetOut,
  DetInNonDetOut,
  NonDetInDetOut,
  NonDetInNonDetOut,
};

const char* stability_name(StabilityClass c);
bool deterministic_output(StabilityClass c);

// Applications see only work-unit ranges; the runtime owns decomposition,
// scheduling and retransmission. For Det-output apps execute() must be a
// pure function of (range, task_seed).
class Application {
 public:
  virtual ~Application() = default;
  virtual std::string name() const = 0;
  virtual StabilityClass stability() const = 0;
  virtual std::int64_t total_units() const = 0;
  virtual Bytes execute(std::int64_t lo, std::int64_t hi, std::uint64_t task_seed,
                        Tick now) const = 0;
  virtual Bytes merge(std::span<const StoredResult> results) const = 0;
  virtual bool verify(const Bytes& answer) const = 0;
};

// name in {matmul, parallel_search, monte_carlo_pi, random_reduce}.
// Throws std::invalid_argument for unknown names.
std::unique_ptr<Application> make_application(const std::string& name,
                                              std::uint64_t run_seed, std::int64_t n);

struct AppInfo {
  std::string name;
  StabilityClass stability;
};
std::vector<AppInfo> builtin_applications();

enum class RunStatus { Success, Timeout, Mismatch, Unsupported };

const char* run_status_name(RunStatus s);

struct RunReport {
  RunStatus status = RunStatus::Timeout;
  Tick makespan = 0;  // first task emission to last result acceptance
  std::map<std::string, Tick> per_worker_finish;
  std::map<std::string, std::int64_t> per_worker_units;
  std::int64_t retransmissions = 0;
  std::uint64_t result_digest = 0;
  int masters_used = 0;
  Bytes answer;
  bool verified = false;
};

struct Accepted {
  Bytes payload;
};
struct Mismatch {};
struct Unsupported {};
using AcceptDecision = std::variant<Accepted, Mismatch, Unsupported>;

// Redundant-master arbitration per stability class. DetInDetOut demands
// byte-identical answers; NonDet-output classes accept the first answer in
// master order; NonDetInDetOut cannot be arbitrated without checkpoints.
AcceptDecision accept_policy(StabilityClass cls, std::span<const Bytes> answers);

}  // namespace smc

#endif
