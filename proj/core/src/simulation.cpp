#include "smc/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <memory>

namespace smc {
namespace {

Bytes encode_range(const TaskRange& r) {
  Bytes b;
  append_i64(b, r.lo);
  append_i64(b, r.hi);
  return b;
}

TaskRange decode_range(TaskId id, const Bytes& b) {
  return TaskRange{id, read_i64(b, 0), read_i64(b, 8)};
}

std::vector<TaskRange> build_tasks(const SmcRunParams& p) {
  if (p.grain_mode == GrainMode::StaticNP)
    return static_np_partition(p.total_units, static_cast<std::int64_t>(p.workers.size()));
  return decompose(p.total_units, p.grain);
}

Tick default_lease(const SmcRunParams& p, const std::vector<TaskRange>& tasks) {
  double mean_speed = 0;
  Tick max_delay = 0;
  for (const auto& w : p.workers) {
    mean_speed += w.speed_factor;
    max_delay = std::max(max_delay, w.link_delay);
  }
  mean_speed /= static_cast<double>(p.workers.size());
  const std::int64_t mean_units =
      (p.total_units + static_cast<std::int64_t>(tasks.size()) - 1) /
      static_cast<std::int64_t>(tasks.size());
  const Tick service = compute_duration(mean_units, mean_speed) + 2 * max_delay;
  return std::max<Tick>(4 * service, 4 * kTickScale);
}

struct RunContext {
  Simulator sim;
  std::unique_ptr<Network> net;
  TupleSpace space;
  const Application* app;
  std::string app_id;
  std::vector<TaskRange> tasks;
  Tick lease_len = 0;
  std::uint64_t run_seed = 0;
  bool stopping = false;

  explicit RunContext(std::uint64_t take_seed) : space(take_seed) {}
};

constexpr const char* kSpaceId = "space";

class WorkerAgent {
 public:
  WorkerAgent(RunContext& ctx, const WorkerSpec& spec, std::optional<TaskId> pinned)
      : ctx_(ctx), spec_(spec) {
    pattern_ = Pattern{ctx.app_id, TupleKind::Task, pinned};
  }

  const std::string& id() const { return spec_.worker_id; }
  std::int64_t units_executed() const { return units_; }

  void boot() { poll(); }

  void on_message(const Message& m) {
    if (crashed_) return;
    if (const auto* reply = std::get_if<TakeReply>(&m.body)) {
      if (!awaiting_ || reply->req_id != req_id_) return;  // stale reply
      awaiting_ = false;
      if (reply->task) {
        start_compute(*reply->task);
      } else if (!done()) {
        ctx_.sim.after(kPollInterval, [this, e = epoch_] {
          if (e == epoch_ && !crashed_) poll();
        });
      }
    }
  }

  void crash() {
    crashed_ = true;
    ++epoch_;  // cancels in-flight compute and timers
    awaiting_ = false;
  }

  void recover() {
    crashed_ = false;
    ++epoch_;
    poll();
  }

 private:
  static constexpr Tick kPollInterval = kTickScale;

  bool done() const { return ctx_.stopping; }

  void poll() {
    if (crashed_ || done()) return;
    awaiting_ = true;
    req_id_ += 1;
    ctx_.net->send(id(), kSpaceId,
                   TakeRequest{pattern_, req_id_, ctx_.lease_len});
    const Tick timeout = 2 * spec_.link_delay + 2 * kTickScale;
    ctx_.sim.after(timeout, [this, e = epoch_, r = req_id_] {
      if (e == epoch_ && !crashed_ && awaiting_ && req_id_ == r) {
        awaiting_ = false;
        poll();  // reply lost; ask again
      }
    });
  }

  void start_compute(const Tuple& task) {
    const TaskRange range = decode_range(task.key.task_id, task.payload);
    const Tick dur = compute_duration(range.units(), spec_.speed_factor);
    ctx_.sim.after(dur, [this, range, e = epoch_] {
      if (e != epoch_ || crashed_) return;  // crashed mid-compute
      units_ += range.units();
      const std::uint64_t task_seed = derive_seed(ctx_.run_seed,
                                                  static_cast<std::uint64_t>(range.task_id));
      Bytes result = ctx_.app->execute(range.lo, range.hi, task_seed, ctx_.sim.now());
      ctx_.net->send(id(), kSpaceId,
                     CompleteRequest{ctx_.app_id, range.task_id, std::move(result),
                                     range.units()});
      poll();
    });
  }

  RunContext& ctx_;
  WorkerSpec spec_;
  Pattern pattern_;
  bool crashed_ = false;
  std::uint64_t epoch_ = 0;
  bool awaiting_ = false;
  std::uint64_t req_id_ = 0;
  std::int64_t units_ = 0;
};

class MasterAgent {
 public:
  MasterAgent(RunContext& ctx, std::string id) : ctx_(ctx), id_(std::move(id)) {
    acked_.resize(ctx.tasks.size(), false);
  }

  const std::string& id() const { return id_; }
  bool answered() const { return answered_; }
  const Bytes& answer() const { return answer_; }

  void boot() {
    tick();
    schedule_tick();
  }

  void on_message(const Message& m) {
    if (crashed_ || answered_) return;
    if (const auto* ack = std::get_if<PutAck>(&m.body)) {
      const auto idx = static_cast<std::size_t>(ack->task_id);
      if (idx < acked_.size() && !acked_[idx]) {
        acked_[idx] = true;
        if (++n_acked_ == acked_.size()) phase_ = Phase::Wait;
      }
    } else if (const auto* snap = std::get_if<SnapshotReply>(&m.body)) {
      if (phase_ == Phase::Wait &&
          snap->snap.completed == static_cast<std::int64_t>(ctx_.tasks.size())) {
        phase_ = Phase::Fetch;
        ctx_.net->send(id_, kSpaceId, ResultsRequest{ctx_.app_id});
      }
    } else if (const auto* res = std::get_if<ResultsReply>(&m.body)) {
      if (phase_ == Phase::Fetch) {
        answer_ = ctx_.app->merge(res->results);
        answered_ = true;
      }
    }
  }

  void crash() { crashed_ = true; }
  void recover() { crashed_ = false; }

 private:
  enum class Phase { Put, Wait, Fetch };
  static constexpr Tick kPollInterval = 2 * kTickScale;

  void schedule_tick() {
    ctx_.sim.after(kPollInterval, [this] {
      if (!answered_ && !ctx_.stopping) {
        tick();
        schedule_tick();
      }
    });
  }

  // Periodic driver; every outbound message is retried until the reply
  // that advances the phase arrives.
  void tick() {
    if (crashed_) return;
    switch (phase_) {
      case Phase::Put:
        for (std::size_t i = 0; i < ctx_.tasks.size(); ++i) {
          if (acked_[i]) continue;
          const TaskRange& r = ctx_.tasks[i];
          Tuple t;
          t.key = TupleKey{ctx_.app_id, TupleKind::Task, r.task_id, 0};
          t.payload = encode_range(r);
          t.created_at = ctx_.sim.now();
          ctx_.net->send(id_, kSpaceId, PutRequest{std::move(t)});
        }
        break;
      case Phase::Wait:
        ctx_.net->send(id_, kSpaceId, SnapshotRequest{});
        break;
      case Phase::Fetch:
        ctx_.net->send(id_, kSpaceId, ResultsRequest{ctx_.app_id});
        break;
    }
  }

  RunContext& ctx_;
  std::string id_;
  Phase phase_ = Phase::Put;
  std::vector<bool> acked_;
  std::size_t n_acked_ = 0;
  bool crashed_ = false;
  bool answered_ = false;
  Bytes answer_;
};

class SpaceAgent {
 public:
  explicit SpaceAgent(RunContext& ctx) : ctx_(ctx) {}

  void on_message(const Message& m) {
    auto& net = *ctx_.net;
    const Tick now = ctx_.sim.now();
    if (const auto* take = std::get_if<TakeRequest>(&m.body)) {
      auto task = ctx_.space.take(take->pattern, m.from, take->lease_len, now);
      net.send(kSpaceId, m.from, TakeReply{take->req_id, std::move(task)});
    } else if (const auto* put = std::get_if<PutRequest>(&m.body)) {
      const TaskId id = put->tuple.key.task_id;
      ctx_.space.put(put->tuple);  // duplicate puts rejected, ack either way
      net.send(kSpaceId, m.from, PutAck{id});
    } else if (const auto* comp = std::get_if<CompleteRequest>(&m.body)) {
      const auto outcome =
          ctx_.space.complete(comp->app_id, comp->task_id, comp->result, m.from, now);
      if (outcome == AcceptOutcome::AcceptedFirst) last_accept_by_[m.from] = now;
    } else if (std::get_if<SnapshotRequest>(&m.body)) {
      net.send(kSpaceId, m.from, SnapshotReply{ctx_.space.snapshot()});
    } else if (const auto* req = std::get_if<ResultsRequest>(&m.body)) {
      net.send(kSpaceId, m.from, ResultsReply{ctx_.space.results(req->app_id)});
    }
  }

  const std::map<std::string, Tick>& last_accept_by() const { return last_accept_by_; }

 private:
  RunContext& ctx_;
  std::map<std::string, Tick> last_accept_by_;
};

}  // namespace

RunReport smc_run(const SmcRunParams& params) {
  assert(params.app != nullptr);
  assert(!params.workers.empty());

  RunReport report;
  const StabilityClass cls = params.app->stability();
  if (params.masters_k > 1 && cls == StabilityClass::NonDetInDetOut) {
    report.status = RunStatus::Unsupported;
    return report;  // refused before any work
  }

  RunContext ctx(derive_seed(params.run_seed, 0x7a5e));
  ctx.app = params.app;
  ctx.app_id = params.app->name();
  ctx.run_seed = params.run_seed;
  ctx.tasks = build_tasks(params);
  ctx.lease_len = params.lease_len > 0 ? params.lease_len : default_lease(params, ctx.tasks);
  ctx.net = std::make_unique<Network>(ctx.sim, derive_seed(params.fault_plan.seed, 0x105e),
                                      params.fault_plan.msg_loss_prob);
  const Tick budget =
      params.tick_budget > 0 ? params.tick_budget : 1'000'000 * kTickScale;

  SpaceAgent space_agent(ctx);
  ctx.net->register_agent(kSpaceId, 0,
                          [&](const Message& m) { space_agent.on_message(m); });

  std::vector<std::unique_ptr<WorkerAgent>> workers;
  for (std::size_t i = 0; i < params.workers.size(); ++i) {
    std::optional<TaskId> pinned;
    if (params.grain_mode == GrainMode::StaticNP) pinned = static_cast<TaskId>(i);
    workers.push_back(std::make_unique<WorkerAgent>(ctx, params.workers[i], pinned));
    WorkerAgent* w = workers.back().get();
    ctx.net->register_agent(w->id(), params.workers[i].link_delay,
                            [w](const Message& m) { w->on_message(m); });
  }

  std::vector<std::unique_ptr<MasterAgent>> masters;
  std::vector<bool> master_dead_forever(static_cast<std::size_t>(params.masters_k), false);
  for (int i = 0; i < params.masters_k; ++i) {
    masters.push_back(std::make_unique<MasterAgent>(ctx, "m" + std::to_string(i)));
    MasterAgent* m = masters.back().get();
    ctx.net->register_agent(m->id(), 0, [m](const Message& msg) { m->on_message(msg); });
  }

  // Explicit crash/recover schedule.
  auto find_worker = [&](const std::string& id) -> WorkerAgent* {
    for (auto& w : workers)
      if (w->id() == id) return w.get();
    return nullptr;
  };
  auto find_master = [&](const std::string& id, std::size_t* idx) -> MasterAgent* {
    for (std::size_t i = 0; i < masters.size(); ++i)
      if (masters[i]->id() == id) {
        *idx = i;
        return masters[i].get();
      }
    return nullptr;
  };
  for (const CrashEvent& ev : params.fault_plan.crash_events) {
    std::size_t midx = 0;
    WorkerAgent* w = find_worker(ev.agent_id);
    MasterAgent* m = w ? nullptr : find_master(ev.agent_id, &midx);
    if (!w && !m) continue;
    ctx.sim.at(ev.crash_at, [&ctx, w, m, id = ev.agent_id] {
      ctx.net->set_crashed(id, true);
      if (w) w->crash();
      if (m) m->crash();
    });
    if (ev.recover_at) {
      ctx.sim.at(*ev.recover_at, [&ctx, w, m, id = ev.agent_id] {
        ctx.net->set_crashed(id, false);
        if (w) w->recover();
        if (m) m->recover();
      });
    } else if (m) {
      master_dead_forever[midx] = true;
    }
  }

  // Recurring lease check; also samples per-step crashes when configured.
  Rng crash_rng(derive_seed(params.fault_plan.seed, 0xc4a5));
  const Tick lease_check = std::max<Tick>(ctx.lease_len / 2, 1);
  std::function<void()> lease_tick = [&] {
    ctx.space.expire(ctx.sim.now());
    if (params.fault_plan.per_step_crash_prob > 0.0) {
      for (auto& w : workers) {
        if (!ctx.net->crashed(w->id()) &&
            crash_rng.uniform01() < params.fault_plan.per_step_crash_prob) {
          ctx.net->set_crashed(w->id(), true);
          w->crash();
          WorkerAgent* wp = w.get();
          ctx.sim.after(2 * ctx.lease_len, [&ctx, wp] {
            ctx.net->set_crashed(wp->id(), false);
            wp->recover();
          });
        }
      }
    }
    if (!ctx.stopping) ctx.sim.after(lease_check, lease_tick);
  };
  ctx.sim.after(lease_check, lease_tick);

  for (auto& m : masters) m->boot();
  for (auto& w : workers) w->boot();

  auto done = [&] {
    for (std::size_t i = 0; i < masters.size(); ++i) {
      if (!masters[i]->answered() && !master_dead_forever[i]) return false;
    }
    // At least one answer is required; all-dead masters never finish.
    for (auto& m : masters)
      if (m->answered()) return true;
    return false;
  };

  const bool finished = ctx.sim.run_until(budget, done);
  ctx.stopping = true;

  for (auto& w : workers) report.per_worker_units[w->id()] = w->units_executed();
  for (const auto& [wid, t] : space_agent.last_accept_by()) report.per_worker_finish[wid] = t;
  report.retransmissions = ctx.space.reissue_count();
  report.makespan = ctx.space.last_accept_tick();

  if (!finished) {
    report.status = RunStatus::Timeout;
    return report;
  }

  std::vector<Bytes> answers;
  for (auto& m : masters)
    if (m->answered()) answers.push_back(m->answer());
  report.masters_used = static_cast<int>(answers.size());

  if (params.masters_k == 1) {
    report.answer = answers.front();
    report.status = RunStatus::Success;
  } else {
    AcceptDecision decision = accept_policy(cls, answers);
    if (std::holds_alternative<Accepted>(decision)) {
      report.answer = std::get<Accepted>(decision).payload;
      report.status = RunStatus::Success;
    } else if (std::holds_alternative<Mismatch>(decision)) {
      report.status = RunStatus::Mismatch;
      return report;
    } else {
      report.status = RunStatus::Unsupported;
      return report;
    }
  }
  report.result_digest = fnv1a64(report.answer);
  report.verified = params.app->verify(report.answer);
  return report;
}

std::int64_t vc_message_count(std::int64_t tasks) { return 2 * tasks; }

VcRunOutcome vc_run(const SmcRunParams& params) {
  assert(!params.workers.empty());
  std::vector<TaskRange> tasks = build_tasks(params);
  const std::size_t n_workers = params.workers.size();

  // Explicit assignment: task i rides worker i mod P's circuit; the master
  // sends the next task only after the previous result returns.
  struct Msg {
    Tick sent;
    Tick arrives;
    std::size_t worker;
    std::uint64_t seq;
  };
  std::vector<Msg> msgs;
  std::vector<Tick> cursor(n_workers, 0);
  std::vector<Tick> finish(n_workers, 0);
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::size_t w = i % n_workers;
    const WorkerSpec& ws = params.workers[w];
    const Tick send_task = cursor[w];
    const Tick task_arrives = send_task + ws.link_delay;
    const Tick compute_end = task_arrives + compute_duration(tasks[i].units(), ws.speed_factor);
    const Tick result_arrives = compute_end + ws.link_delay;
    msgs.push_back(Msg{send_task, task_arrives, w, seq++});
    msgs.push_back(Msg{compute_end, result_arrives, w, seq++});
    cursor[w] = result_arrives;
    finish[w] = result_arrives;
  }
  std::sort(msgs.begin(), msgs.end(), [](const Msg& a, const Msg& b) {
    if (a.sent != b.sent) return a.sent < b.sent;
    if (a.worker != b.worker) return a.worker < b.worker;
    return a.seq < b.seq;
  });

  VcRunOutcome out;
  out.messages = vc_message_count(static_cast<std::int64_t>(tasks.size()));

  // First lost message, in chronological send order, breaks its circuit and
  // halts the run. One Bernoulli draw per message keeps the empirical
  // success fraction exactly (1-p)^M.
  Rng loss_rng(derive_seed(params.fault_plan.seed, 0x105e));
  const double p = params.fault_plan.msg_loss_prob;
  std::optional<Tick> loss_halt;
  for (const Msg& m : msgs) {
    const bool lost = p > 0.0 && loss_rng.uniform01() < p;
    if (lost) {
      loss_halt = m.arrives;
      break;
    }
  }

  // A crash while the worker's circuit is still active halts the run.
  std::optional<Tick> crash_halt;
  for (const CrashEvent& ev : params.fault_plan.crash_events) {
    for (std::size_t w = 0; w < n_workers; ++w) {
      if (params.workers[w].worker_id == ev.agent_id && ev.crash_at < finish[w]) {
        if (!crash_halt || ev.crash_at < *crash_halt) crash_halt = ev.crash_at;
      }
    }
  }

  if (loss_halt && (!crash_halt || *loss_halt <= *crash_halt)) {
    out.status = VcStatus::Halted;
    out.halt_cause = HaltCause::MessageLoss;
    out.elapsed = *loss_halt;
  } else if (crash_halt) {
    out.status = VcStatus::Halted;
    out.halt_cause = HaltCause::WorkerCrash;
    out.elapsed = *crash_halt;
  } else {
    out.status = VcStatus::Success;
    out.elapsed = *std::max_element(finish.begin(), finish.end());
  }
  return out;
}

}  // namespace smc
