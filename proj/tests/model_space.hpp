#ifndef SMC_TESTS_MODEL_SPACE_HPP
#define SMC_TESTS_MODEL_SPACE_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "smc/rng.hpp"
#include "smc/time.hpp"

// Test-only oracle: an independent, brute-force model of the three-state
// task lifecycle (Pending -> Shadowed -> Completed, Shadowed -> Pending on
// expiry, Pending -> Completed for stale completions). It replays the same
// seeded selection rule (uniform index into the ascending-sorted pending
// set) without sharing any code with TupleSpace.
namespace smc_test {

class ModelSpace {
 public:
  enum class State { Pending, Shadowed, Completed };

  explicit ModelSpace(std::uint64_t take_seed) : rng_(take_seed) {}

  bool put(std::int64_t id) {
    if (tasks_.contains(id)) return false;
    tasks_[id] = Entry{State::Pending, 0, 0};
    return true;
  }

  // Returns the chosen task id, or -1 when nothing is pending.
  std::int64_t take(smc::Tick now, smc::Tick lease_len) {
    std::vector<std::int64_t> pending;
    for (const auto& [id, e] : tasks_)
      if (e.state == State::Pending) pending.push_back(id);
    if (pending.empty()) return -1;
    const std::int64_t id = pending[rng_.bounded(pending.size())];
    tasks_[id].state = State::Shadowed;
    tasks_[id].lease_expiry = now + lease_len;
    return id;
  }

  // True iff this complete is the first accepted one.
  bool complete(std::int64_t id) {
    auto it = tasks_.find(id);
    if (it == tasks_.end() || it->second.state == State::Completed) return false;
    it->second.state = State::Completed;
    return true;
  }

  std::vector<std::int64_t> expire(smc::Tick now) {
    std::vector<std::int64_t> out;
    for (auto& [id, e] : tasks_) {
      if (e.state == State::Shadowed && e.lease_expiry <= now) {
        e.state = State::Pending;
        e.attempt += 1;
        out.push_back(id);
      }
    }
    return out;
  }

  std::int64_t count(State s) const {
    std::int64_t n = 0;
    for (const auto& [_, e] : tasks_)
      if (e.state == s) ++n;
    return n;
  }

  std::int64_t total_attempts() const {
    std::int64_t n = 0;
    for (const auto& [_, e] : tasks_) n += e.attempt;
    return n;
  }

  std::size_t size() const { return tasks_.size(); }

 private:
  struct Entry {
    State state;
    std::uint32_t attempt;
    smc::Tick lease_expiry;
  };
  std::map<std::int64_t, Entry> tasks_;
  smc::Rng rng_;
};

}  // namespace smc_test

#endif
