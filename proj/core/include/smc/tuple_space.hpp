#ifndef SMC_TUPLE_SPACE_HPP
#define SMC_TUPLE_SPACE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smc/digest.hpp"
#include "smc/rng.hpp"
#include "smc/time.hpp"

namespace smc {

enum class TupleKind { Task, Result, State };

using TaskId = std::int64_t;

struct TupleKey {
  std::string app_id;
  TupleKind kind = TupleKind::Task;
  TaskId task_id = 0;
  std::uint32_t attempt = 0;  // retransmission generation
};

struct Tuple {
  TupleKey key;
  Bytes payload;
  Tick created_at = 0;
};

// Exact-field match on (app_id, kind[, task_id]); absent task_id is a wildcard.
struct Pattern {
  std::string app_id;
  TupleKind kind = TupleKind::Task;
  std::optional<TaskId> task_id;
};

struct ShadowRecord {
  Tuple task;
  std::string worker_id;
  Tick lease_expiry = 0;
  std::uint32_t attempt = 0;
};

enum class TaskState { Pending, Shadowed, Completed };

enum class PutOutcome { Stored, DuplicateTask, Ignored };

enum class AcceptOutcome { AcceptedFirst, DuplicateIgnored, UnknownTask };

struct SpaceSnapshot {
  std::int64_t pending = 0;
  std::int64_t shadowed = 0;
  std::int64_t completed = 0;
  std::int64_t total_attempts = 0;
};

struct StoredResult {
  TaskId task_id = 0;
  Bytes payload;
  Tick accepted_at = 0;
  std::uint64_t accept_seq = 0;  // global acceptance order
  std::string worker_id;
};

// The switching fabric: a linearizable tuple store with statistic-multiplexed
// take and the shadow-tuple lifecycle (Pending -> Shadowed -> Completed, with
// Shadowed -> Pending on lease expiry and Pending -> Completed for stale but
// correct completions).
class TupleSpace {
 public:
  explicit TupleSpace(std::uint64_t take_seed) : rng_(take_seed) {}

  PutOutcome put(Tuple t);

  // Picks one matching Pending task uniformly at random, shadows it with a
  // lease and returns it. Empty match is a normal outcome.
  std::optional<Tuple> take(const Pattern& p, const std::string& worker_id,
                            Tick lease_len, Tick now);

  AcceptOutcome complete(const std::string& app_id, TaskId task_id,
                         Bytes result_payload, const std::string& worker_id,
                         Tick now);

  // Releases every shadow with lease_expiry <= now back to Pending with
  // attempt+1; returns the reissued task ids in ascending order.
  std::vector<TaskId> expire(Tick now);

  // Non-destructive observation. Completed results first, then Pending
  // tasks, ties broken by lowest task_id.
  std::optional<Tuple> read(const Pattern& p) const;

  SpaceSnapshot snapshot() const;

  std::vector<StoredResult> results(const std::string& app_id) const;

  std::int64_t reissue_count() const { return reissues_; }
  // Duplicate completes whose payload digest differed from the stored result.
  std::int64_t result_mismatches() const { return result_mismatches_; }
  Tick last_accept_tick() const { return last_accept_tick_; }

  static std::string snapshot_csv_header() {
    return "tick,pending,shadowed,completed,attempts";
  }
  static std::string snapshot_csv_row(Tick tick, const SpaceSnapshot& s);

 private:
  struct TaskEntry {
    Tuple task;
    TaskState state = TaskState::Pending;
    std::uint32_t attempt = 0;
    std::optional<ShadowRecord> shadow;
    std::optional<StoredResult> result;
  };

  using Key = std::pair<std::string, TaskId>;

  bool matches(const Pattern& p, const std::string& app_id, TaskId id) const {
    return p.app_id == app_id && (!p.task_id || *p.task_id == id);
  }

  std::map<Key, TaskEntry> tasks_;
  std::vector<Tuple> loose_;  // State tuples and orphan Result puts
  Rng rng_;
  std::uint64_t accept_seq_ = 0;
  std::int64_t reissues_ = 0;
  std::int64_t result_mismatches_ = 0;
  Tick last_accept_tick_ = 0;
};

}  // namespace smc

#endif
