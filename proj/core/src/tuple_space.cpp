#include "smc/tuple_space.hpp"

#include <algorithm>
#include <cstdio>

namespace smc {

PutOutcome TupleSpace::put(Tuple t) {
  if (t.key.kind == TupleKind::Task) {
    Key k{t.key.app_id, t.key.task_id};
    if (tasks_.contains(k)) return PutOutcome::DuplicateTask;
    TaskEntry e;
    e.task = std::move(t);
    e.state = TaskState::Pending;
    tasks_.emplace(std::move(k), std::move(e));
    return PutOutcome::Stored;
  }
  if (t.key.kind == TupleKind::Result) {
    auto it = tasks_.find(Key{t.key.app_id, t.key.task_id});
    if (it != tasks_.end() && it->second.state == TaskState::Completed) {
      return PutOutcome::Ignored;  // result already accepted via complete()
    }
  }
  loose_.push_back(std::move(t));
  return PutOutcome::Stored;
}

std::optional<Tuple> TupleSpace::take(const Pattern& p, const std::string& worker_id,
                                      Tick lease_len, Tick now) {
  if (p.kind != TupleKind::Task || lease_len <= 0) return std::nullopt;
  std::vector<std::map<Key, TaskEntry>::iterator> candidates;
  for (auto it = tasks_.begin(); it != tasks_.end(); ++it) {
    if (it->second.state == TaskState::Pending &&
        matches(p, it->first.first, it->first.second)) {
      candidates.push_back(it);
    }
  }
  if (candidates.empty()) return std::nullopt;
  auto& entry = candidates[rng_.bounded(candidates.size())]->second;
  entry.state = TaskState::Shadowed;
  entry.task.key.attempt = entry.attempt;
  entry.shadow = ShadowRecord{entry.task, worker_id, now + lease_len, entry.attempt};
  return entry.task;
}

AcceptOutcome TupleSpace::complete(const std::string& app_id, TaskId task_id,
                                   Bytes result_payload, const std::string& worker_id,
                                   Tick now) {
  auto it = tasks_.find(Key{app_id, task_id});
  if (it == tasks_.end()) return AcceptOutcome::UnknownTask;
  TaskEntry& e = it->second;
  if (e.state == TaskState::Completed) {
    if (fnv1a64(result_payload) != fnv1a64(e.result->payload)) ++result_mismatches_;
    return AcceptOutcome::DuplicateIgnored;
  }
  e.state = TaskState::Completed;
  e.shadow.reset();
  e.result = StoredResult{task_id, std::move(result_payload), now, ++accept_seq_, worker_id};
  last_accept_tick_ = now;
  return AcceptOutcome::AcceptedFirst;
}

std::vector<TaskId> TupleSpace::expire(Tick now) {
  std::vector<TaskId> reissued;
  for (auto& [key, e] : tasks_) {
    if (e.state == TaskState::Shadowed && e.shadow->lease_expiry <= now) {
      e.shadow.reset();
      e.state = TaskState::Pending;
      e.attempt += 1;
      e.task.key.attempt = e.attempt;
      reissued.push_back(key.second);
    }
  }
  reissues_ += static_cast<std::int64_t>(reissued.size());
  return reissued;  // map order is ascending task_id per app
}

std::optional<Tuple> TupleSpace::read(const Pattern& p) const {
  if (p.kind == TupleKind::Result) {
    for (const auto& [key, e] : tasks_) {
      if (e.result && matches(p, key.first, key.second)) {
        Tuple t;
        t.key = TupleKey{key.first, TupleKind::Result, key.second, e.attempt};
        t.payload = e.result->payload;
        t.created_at = e.result->accepted_at;
        return t;
      }
    }
    for (const auto& t : loose_) {
      if (t.key.kind == TupleKind::Result && matches(p, t.key.app_id, t.key.task_id))
        return t;
    }
    return std::nullopt;
  }
  if (p.kind == TupleKind::Task) {
    // Completed first, then Pending; map order gives lowest task_id.
    for (const auto& [key, e] : tasks_) {
      if (e.state == TaskState::Completed && matches(p, key.first, key.second))
        return e.task;
    }
    for (const auto& [key, e] : tasks_) {
      if (e.state == TaskState::Pending && matches(p, key.first, key.second))
        return e.task;
    }
    return std::nullopt;
  }
  for (const auto& t : loose_) {
    if (t.key.kind == p.kind && matches(p, t.key.app_id, t.key.task_id)) return t;
  }
  return std::nullopt;
}

SpaceSnapshot TupleSpace::snapshot() const {
  SpaceSnapshot s;
  for (const auto& [key, e] : tasks_) {
    switch (e.state) {
      case TaskState::Pending: ++s.pending; break;
      case TaskState::Shadowed: ++s.shadowed; break;
      case TaskState::Completed: ++s.completed; break;
    }
    s.total_attempts += e.attempt;
  }
  return s;
}

std::vector<StoredResult> TupleSpace::results(const std::string& app_id) const {
  std::vector<StoredResult> out;
  for (const auto& [key, e] : tasks_) {
    if (key.first == app_id && e.result) out.push_back(*e.result);
  }
  return out;  // ascending task_id
}

std::string TupleSpace::snapshot_csv_row(Tick tick, const SpaceSnapshot& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%lld,%lld",
                static_cast<long long>(tick), static_cast<long long>(s.pending),
                static_cast<long long>(s.shadowed), static_cast<long long>(s.completed),
                static_cast<long long>(s.total_attempts));
  return buf;
}

}  // namespace smc
