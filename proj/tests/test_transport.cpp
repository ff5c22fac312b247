#include <doctest.h>

#include <vector>

#include "smc/simulation.hpp"

using namespace smc;

TEST_CASE("events run in (tick, insertion) order and reject the past") {
  Simulator sim;
  std::vector<int> order;
  sim.at(5, [&] { order.push_back(2); });
  sim.at(0, [&] { order.push_back(1); });
  sim.at(5, [&] { order.push_back(3); });  // same tick, inserted later
  CHECK(sim.run_until_idle() == 5);
  CHECK(order == std::vector<int>{1, 2, 3});

  CHECK_THROWS_AS(sim.at(1, [] {}), PastEventError);
  CHECK(sim.run_until_idle() == 5);  // empty queue keeps the clock
}

TEST_CASE("an event scheduled at now executes this tick") {
  Simulator sim;
  bool ran = false;
  sim.at(0, [&] { ran = true; });
  sim.step();
  CHECK(ran);
  CHECK(sim.now() == 0);
}

TEST_CASE("network loss and crash semantics") {
  SUBCASE("loss probability 1 drops every message") {
    Simulator sim;
    Network net(sim, 1, 1.0);
    int received = 0;
    net.register_agent("a", 0, [&](const Message&) { ++received; });
    net.register_agent("b", 0, [&](const Message&) { ++received; });
    for (int i = 0; i < 20; ++i) net.send("a", "b", SnapshotRequest{});
    sim.run_until_idle();
    CHECK(received == 0);
    CHECK(net.dropped() == 20);
  }
  SUBCASE("no loss and no crash conserves messages") {
    Simulator sim;
    Network net(sim, 1, 0.0);
    int received = 0;
    net.register_agent("a", 0, [&](const Message&) {});
    net.register_agent("b", 2 * kTickScale, [&](const Message&) { ++received; });
    for (int i = 0; i < 20; ++i) net.send("a", "b", SnapshotRequest{});
    sim.run_until_idle();
    CHECK(received == 20);
    CHECK(net.delivered() == net.sent());
    CHECK(sim.now() == 2 * kTickScale);
  }
  SUBCASE("no phantom delivery to a crashed destination") {
    Simulator sim;
    Network net(sim, 1, 0.0);
    int received = 0;
    net.register_agent("a", 0, [&](const Message&) {});
    net.register_agent("b", kTickScale, [&](const Message&) { ++received; });
    net.send("a", "b", SnapshotRequest{});
    net.set_crashed("b", true);  // crashes while the message is in flight
    sim.run_until_idle();
    CHECK(received == 0);
    CHECK(net.dropped() == 1);
  }
}

namespace {

std::vector<WorkerSpec> homogeneous(int n, double speed = 1.0, Tick delay = 0) {
  std::vector<WorkerSpec> w;
  for (int i = 0; i < n; ++i)
    w.push_back(WorkerSpec{"w" + std::to_string(i), speed, delay});
  return w;
}

SmcRunParams base_params(const Application& app, std::int64_t n, int workers,
                         std::int64_t grain) {
  SmcRunParams p;
  p.app = &app;
  p.total_units = n;
  p.workers = homogeneous(workers);
  p.grain = grain;
  p.fault_plan.seed = 11;
  p.run_seed = 7;
  return p;
}

}  // namespace

TEST_CASE("serial fault-free run: makespan equals the sum of service times") {
  auto app = make_application("monte_carlo_pi", 7, 4);
  SmcRunParams p = base_params(*app, 4, 1, 1);
  RunReport r = smc_run(p);
  CHECK(r.status == RunStatus::Success);
  CHECK(r.makespan == 4 * kTickScale);  // 4 unit tasks, speed 1, no delay
  CHECK(r.retransmissions == 0);
  CHECK(r.per_worker_units.at("w0") == 4);
}

TEST_CASE("worker crash mid-task recovers via shadow expiry") {
  auto app = make_application("matmul", 7, 16);
  SmcRunParams p = base_params(*app, 16, 2, 4);

  RunReport fault_free = smc_run(p);
  REQUIRE(fault_free.status == RunStatus::Success);

  p.fault_plan.crash_events.push_back(CrashEvent{"w0", kTickScale / 2, std::nullopt});
  RunReport faulty = smc_run(p);
  CHECK(faulty.status == RunStatus::Success);
  CHECK(faulty.retransmissions >= 1);
  CHECK(faulty.result_digest == fault_free.result_digest);  // oracle: fault-free run
}

TEST_CASE("all workers crashed forever times out") {
  auto app = make_application("monte_carlo_pi", 7, 4);
  SmcRunParams p = base_params(*app, 4, 2, 1);
  p.tick_budget = 200 * kTickScale;
  p.fault_plan.crash_events.push_back(CrashEvent{"w0", 0, std::nullopt});
  p.fault_plan.crash_events.push_back(CrashEvent{"w1", 0, std::nullopt});
  RunReport r = smc_run(p);
  CHECK(r.status == RunStatus::Timeout);
}

TEST_CASE("identical params produce byte-identical reports") {
  auto app = make_application("matmul", 3, 64);
  SmcRunParams p = base_params(*app, 64, 3, 8);
  p.fault_plan.msg_loss_prob = 0.2;
  RunReport a = smc_run(p);
  RunReport b = smc_run(p);
  CHECK(a.status == b.status);
  CHECK(a.makespan == b.makespan);
  CHECK(a.retransmissions == b.retransmissions);
  CHECK(a.result_digest == b.result_digest);
  CHECK(a.per_worker_finish == b.per_worker_finish);
  CHECK(a.per_worker_units == b.per_worker_units);
}

TEST_CASE("vc_run basics") {
  auto app = make_application("monte_carlo_pi", 7, 8);
  SmcRunParams p = base_params(*app, 8, 2, 1);

  SUBCASE("no faults succeeds") {
    VcRunOutcome out = vc_run(p);
    CHECK(out.status == VcStatus::Success);
    CHECK(!out.halt_cause.has_value());
    CHECK(out.messages == 16);
  }
  SUBCASE("certain loss halts at the first message") {
    p.fault_plan.msg_loss_prob = 1.0;
    VcRunOutcome out = vc_run(p);
    CHECK(out.status == VcStatus::Halted);
    CHECK(out.halt_cause == HaltCause::MessageLoss);
  }
  SUBCASE("a crash on an active circuit halts") {
    p.fault_plan.crash_events.push_back(CrashEvent{"w1", kTickScale, std::nullopt});
    VcRunOutcome out = vc_run(p);
    CHECK(out.status == VcStatus::Halted);
    CHECK(out.halt_cause == HaltCause::WorkerCrash);
  }
}

TEST_CASE("empirical vc success tracks the Bernoulli product") {
  // N messages at loss p: success fraction over seeds ~ (1-p)^N.
  auto app = make_application("monte_carlo_pi", 7, 50);
  const double p_loss = 0.001;
  const int trials = 1000;
  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    SmcRunParams p = base_params(*app, 50, 2, 1);
    p.fault_plan.seed = static_cast<std::uint64_t>(t) + 1;
    p.fault_plan.msg_loss_prob = p_loss;
    if (vc_run(p).status == VcStatus::Success) ++successes;
  }
  const double q = std::pow(1.0 - p_loss, 100.0);
  const double stderr3 = 3.0 * std::sqrt(q * (1.0 - q) / trials);
  CHECK(std::abs(static_cast<double>(successes) / trials - q) <= stderr3);
}

TEST_CASE("smc weakly dominates vc on every individual fault plan") {
  auto app = make_application("monte_carlo_pi", 7, 12);
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    SmcRunParams p = base_params(*app, 12, 3, 1);
    p.fault_plan.seed = seed;
    p.fault_plan.msg_loss_prob = 0.05;
    p.tick_budget = 2000 * kTickScale;
    const bool vc_ok = vc_run(p).status == VcStatus::Success;
    const bool smc_ok = smc_run(p).status == RunStatus::Success;
    if (vc_ok) CHECK(smc_ok);
  }
}

TEST_CASE("liveness: random fault schedules that spare one worker always finish") {
  auto app = make_application("monte_carlo_pi", 7, 8);
  Rng meta(31337);
  const int schedules = 10000;
  int completed_runs = 0;
  for (int i = 0; i < schedules; ++i) {
    SmcRunParams p = base_params(*app, 8, 3, 1);
    p.fault_plan.seed = meta.next();
    p.fault_plan.msg_loss_prob = 0.1 * static_cast<double>(meta.bounded(4));
    // Crash up to two of the three workers, always with recovery.
    const int crashes = static_cast<int>(meta.bounded(3));
    for (int c = 0; c < crashes; ++c) {
      const Tick at = static_cast<Tick>(meta.bounded(8 * kTickScale));
      p.fault_plan.crash_events.push_back(
          CrashEvent{"w" + std::to_string(c), at, at + 10 * kTickScale});
    }
    p.tick_budget = 5000 * kTickScale;
    if (smc_run(p).status == RunStatus::Success) ++completed_runs;
  }
  CHECK(completed_runs == schedules);
}
