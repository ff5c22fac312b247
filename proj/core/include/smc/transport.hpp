#ifndef SMC_TRANSPORT_HPP
#define SMC_TRANSPORT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "smc/rng.hpp"
#include "smc/time.hpp"
#include "smc/tuple_space.hpp"

namespace smc {

struct CrashEvent {
  std::string agent_id;
  Tick crash_at = 0;                 // subticks once loaded
  std::optional<Tick> recover_at;    // absent = never recovers
};

// Seeded schedule of message losses and crash/recover events. Fully
// determined by seed + fields.
struct FaultPlan {
  std::uint64_t seed = 0;
  double msg_loss_prob = 0.0;
  std::vector<CrashEvent> crash_events;
  double per_step_crash_prob = 0.0;  // sampled at each lease check
};

class PastEventError : public std::runtime_error {
 public:
  explicit PastEventError(const std::string& what) : std::runtime_error(what) {}
};

// Single-threaded deterministic discrete-event loop. Events at the same
// tick execute in insertion order.
class Simulator {
 public:
  Tick now() const { return now_; }

  void at(Tick t, std::function<void()> fn) {
    if (t < now_) throw PastEventError("event scheduled in the past");
    queue_.push(Entry{t, seq_++, std::move(fn)});
  }

  void after(Tick delay, std::function<void()> fn) { at(now_ + delay, std::move(fn)); }

  bool step() {
    if (queue_.empty()) return false;
    Entry e = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    now_ = e.at;
    e.fn();
    return true;
  }

  Tick run_until_idle() {
    while (step()) {}
    return now_;
  }

  // Runs until `done` holds, the queue drains, or the budget tick passes.
  // Returns true iff `done` held.
  bool run_until(Tick budget, const std::function<bool()>& done) {
    while (!done()) {
      if (queue_.empty() || queue_.top().at > budget) return false;
      step();
    }
    return true;
  }

  bool idle() const { return queue_.empty(); }

 private:
  struct Entry {
    Tick at;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Entry& o) const {
      return at != o.at ? at > o.at : seq > o.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  Tick now_ = 0;
  std::uint64_t seq_ = 0;
};

// --- message bodies exchanged between agents and the space -----------------

struct TakeRequest {
  Pattern pattern;
  std::uint64_t req_id = 0;
  Tick lease_len = 0;
};
struct TakeReply {
  std::uint64_t req_id = 0;
  std::optional<Tuple> task;
};
struct PutRequest {
  Tuple tuple;
};
struct PutAck {
  TaskId task_id = 0;
};
struct CompleteRequest {
  std::string app_id;
  TaskId task_id = 0;
  Bytes result;
  std::int64_t units = 0;
};
struct SnapshotRequest {};
struct SnapshotReply {
  SpaceSnapshot snap;
};
struct ResultsRequest {
  std::string app_id;
};
struct ResultsReply {
  std::vector<StoredResult> results;
};

using Payload = std::variant<TakeRequest, TakeReply, PutRequest, PutAck,
                             CompleteRequest, SnapshotRequest, SnapshotReply,
                             ResultsRequest, ResultsReply>;

struct Message {
  std::string from;
  std::string to;
  Payload body;
};

// Message fabric with seeded loss and crash state. A message sampled as
// lost, or delivered while its destination is crashed, never reaches the
// handler; senders must rely on retransmission discipline above this layer.
class Network {
 public:
  Network(Simulator& sim, std::uint64_t loss_seed, double msg_loss_prob)
      : sim_(sim), loss_rng_(loss_seed), loss_prob_(msg_loss_prob) {}

  using Handler = std::function<void(const Message&)>;

  void register_agent(const std::string& id, Tick link_delay, Handler h) {
    agents_[id] = Endpoint{link_delay, std::move(h), false};
  }

  void send(const std::string& from, const std::string& to, Payload body) {
    ++sent_;
    const bool lost = loss_prob_ > 0.0 && loss_rng_.uniform01() < loss_prob_;
    const Tick delay = agents_.at(from).link_delay + agents_.at(to).link_delay;
    Message m{from, to, std::move(body)};
    sim_.after(delay, [this, m = std::move(m), lost] {
      auto& dst = agents_.at(m.to);
      if (lost || dst.crashed) {
        ++dropped_;
        return;
      }
      ++delivered_;
      dst.handler(m);
    });
  }

  void set_crashed(const std::string& id, bool crashed) { agents_.at(id).crashed = crashed; }
  bool crashed(const std::string& id) const { return agents_.at(id).crashed; }

  std::int64_t sent() const { return sent_; }
  std::int64_t delivered() const { return delivered_; }
  std::int64_t dropped() const { return dropped_; }

 private:
  struct Endpoint {
    Tick link_delay = 0;
    Handler handler;
    bool crashed = false;
  };
  Simulator& sim_;
  std::map<std::string, Endpoint> agents_;
  Rng loss_rng_;
  double loss_prob_;
  std::int64_t sent_ = 0;
  std::int64_t delivered_ = 0;
  std::int64_t dropped_ = 0;
};

}  // namespace smc

#endif
