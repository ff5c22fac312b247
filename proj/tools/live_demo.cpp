// Demo: the pull-mode runtime over a real loopback TCP transport instead of
// the deterministic simulator. One space server, several worker threads and
// one master thread exchange the same message structs the simulation uses.
// Excluded from acceptance: thread scheduling makes the task->worker mapping
// nondeterministic, but the merged result digest must still match a
// sequential reference execution.

#include <cstdio>
#include <thread>
#include <vector>

#include "smc/granularity.hpp"
#include "smc/live_transport.hpp"
#include "smc/runtime.hpp"

using namespace smc;

namespace {

Bytes encode_range(const TaskRange& r) {
  Bytes b;
  append_i64(b, r.lo);
  append_i64(b, r.hi);
  return b;
}

void worker_loop(const Application& app, std::uint64_t run_seed, int port, int index) {
  LiveClient client("w" + std::to_string(index), port);
  const Pattern any{app.name(), TupleKind::Task, std::nullopt};
  int idle_polls = 0;
  while (idle_polls < 50) {
    TakeRequest take;
    take.pattern = any;
    take.lease_len = 1'000'000;
    const auto reply = std::get<TakeReply>(client.request(take));
    if (!reply.task) {
      ++idle_polls;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
      continue;
    }
    idle_polls = 0;
    const Tuple& t = *reply.task;
    const std::int64_t lo = read_i64(t.payload, 0);
    const std::int64_t hi = read_i64(t.payload, 8);
    CompleteRequest done;
    done.app_id = app.name();
    done.task_id = t.key.task_id;
    done.result = app.execute(lo, hi, derive_seed(run_seed, t.key.task_id), 0);
    done.units = hi - lo;
    client.request(done);
  }
}

}  // namespace

int main() {
  const std::uint64_t run_seed = 21;
  const std::int64_t n = 1024;  // 32x32 multiply
  const std::int64_t grain = 32;
  const int n_workers = 4;
  auto app = make_application("matmul", run_seed, n);

  LiveSpaceServer server(run_seed);
  std::printf("space listening on 127.0.0.1:%d\n", server.port());

  LiveClient master("m0", server.port());
  std::int64_t total_tasks = 0;
  for (const TaskRange& r : decompose(n, grain)) {
    Tuple t;
    t.key = TupleKey{app->name(), TupleKind::Task, r.task_id, 0};
    t.payload = encode_range(r);
    master.request(PutRequest{t});
    ++total_tasks;
  }

  std::vector<std::thread> workers;
  for (int i = 0; i < n_workers; ++i)
    workers.emplace_back([&, i] { worker_loop(*app, run_seed, server.port(), i); });

  for (;;) {
    const auto snap = std::get<SnapshotReply>(master.request(SnapshotRequest{})).snap;
    if (snap.completed == total_tasks) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  const auto results =
      std::get<ResultsReply>(master.request(ResultsRequest{app->name()})).results;
  const Bytes answer = app->merge(results);
  const bool ok = app->verify(answer);

  for (std::thread& w : workers) w.join();
  server.stop();

  std::printf("tasks=%lld workers=%d digest=%s verified=%s\n",
              static_cast<long long>(total_tasks), n_workers,
              digest_hex(fnv1a64(answer)).c_str(), ok ? "yes" : "no");
  return ok ? 0 : 1;
}
