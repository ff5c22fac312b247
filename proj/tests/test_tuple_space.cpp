#include <doctest.h>

#include <algorithm>
#include <set>

#include "model_space.hpp"
#include "smc/tuple_space.hpp"

using namespace smc;

namespace {

Tuple task_tuple(TaskId id, Tick at = 0) {
  Tuple t;
  t.key = TupleKey{"app", TupleKind::Task, id, 0};
  t.payload = Bytes{static_cast<std::uint8_t>(id)};
  t.created_at = at;
  return t;
}

Pattern any_task() { return Pattern{"app", TupleKind::Task, std::nullopt}; }

}  // namespace

TEST_CASE("put stores tasks and rejects duplicates") {
  TupleSpace space(1);
  CHECK(space.put(task_tuple(0)) == PutOutcome::Stored);
  auto s = space.snapshot();
  CHECK(s.pending == 1);

  CHECK(space.put(task_tuple(0)) == PutOutcome::DuplicateTask);
  s = space.snapshot();
  CHECK(s.pending == 1);
  CHECK(s.shadowed == 0);
  CHECK(s.completed == 0);
}

TEST_CASE("snapshot partitions all puts") {
  TupleSpace space(1);
  for (TaskId i = 0; i < 8; ++i) CHECK(space.put(task_tuple(i)) == PutOutcome::Stored);
  auto s = space.snapshot();
  CHECK(s.pending == 8);
  CHECK(s.shadowed == 0);
  CHECK(s.completed == 0);
  CHECK(s.total_attempts == 0);

  space.take(any_task(), "w1", 10, 0);
  space.take(any_task(), "w1", 10, 0);
  s = space.snapshot();
  CHECK(s.pending == 6);
  CHECK(s.shadowed == 2);
  CHECK(s.completed == 0);
}

TEST_CASE("take on empty space is a normal miss") {
  TupleSpace space(1);
  CHECK(!space.take(any_task(), "w1", 10, 0).has_value());
}

TEST_CASE("take shadows the single candidate") {
  TupleSpace space(1);
  space.put(task_tuple(0));
  auto t = space.take(any_task(), "w1", 10, 0);
  REQUIRE(t.has_value());
  CHECK(t->key.task_id == 0);
  auto s = space.snapshot();
  CHECK(s.shadowed == 1);
  CHECK(s.pending == 0);
}

TEST_CASE("seeded takes yield a reproducible permutation matching the generator replay") {
  // Oracle: replay the documented selection rule (uniform index into the
  // ascending pending set) on an independent model.
  for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
    TupleSpace space(seed);
    smc_test::ModelSpace model(seed);
    for (TaskId i = 0; i < 10; ++i) {
      space.put(task_tuple(i));
      model.put(i);
    }
    std::vector<TaskId> got, expected;
    for (int i = 0; i < 10; ++i) {
      auto t = space.take(any_task(), "w1", 10, 0);
      REQUIRE(t.has_value());
      got.push_back(t->key.task_id);
      expected.push_back(model.take(0, 10));
    }
    CHECK(got == expected);

    std::vector<TaskId> sorted = got;
    std::sort(sorted.begin(), sorted.end());
    std::vector<TaskId> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(sorted == all);  // a permutation of 0..9

    // Same seed reproduces the same permutation.
    TupleSpace space2(seed);
    for (TaskId i = 0; i < 10; ++i) space2.put(task_tuple(i));
    for (int i = 0; i < 10; ++i) {
      auto t = space2.take(any_task(), "w1", 10, 0);
      REQUIRE(t.has_value());
      CHECK(t->key.task_id == got[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("complete happy path and idempotence") {
  TupleSpace space(1);
  space.put(task_tuple(0));
  space.take(any_task(), "w1", 10, 0);
  CHECK(space.complete("app", 0, Bytes{42}, "w1", 5) == AcceptOutcome::AcceptedFirst);
  CHECK(space.snapshot().completed == 1);

  CHECK(space.complete("app", 0, Bytes{42}, "w1", 6) == AcceptOutcome::DuplicateIgnored);
  auto results = space.results("app");
  REQUIRE(results.size() == 1);
  CHECK(results[0].payload == Bytes{42});

  CHECK(space.complete("app", 99, Bytes{1}, "w1", 6) == AcceptOutcome::UnknownTask);
}

TEST_CASE("stale completion by the original slow worker wins") {
  TupleSpace space(1);
  smc_test::ModelSpace model(1);
  space.put(task_tuple(0));
  model.put(0);

  space.take(any_task(), "w1", 10, 0);
  CHECK(model.take(0, 10) == 0);

  CHECK(space.expire(10) == std::vector<TaskId>{0});
  CHECK(model.expire(10) == std::vector<std::int64_t>{0});

  auto t2 = space.take(any_task(), "w2", 10, 10);
  REQUIRE(t2.has_value());
  CHECK(t2->key.attempt == 1);
  CHECK(model.take(10, 10) == 0);

  // Lifecycle oracle predicts: w1's stale complete is first, w2's is dup.
  CHECK(model.complete(0) == true);
  CHECK(space.complete("app", 0, Bytes{7}, "w1", 12) == AcceptOutcome::AcceptedFirst);
  CHECK(model.complete(0) == false);
  CHECK(space.complete("app", 0, Bytes{7}, "w2", 13) == AcceptOutcome::DuplicateIgnored);
}

TEST_CASE("expire boundaries") {
  TupleSpace space(1);
  CHECK(space.expire(100).empty());

  space.put(task_tuple(0));
  space.take(any_task(), "w1", 10, 0);  // lease_expiry = 10
  auto reissued = space.expire(10);     // boundary is inclusive
  CHECK(reissued == std::vector<TaskId>{0});
  auto s = space.snapshot();
  CHECK(s.pending == 1);
  CHECK(s.total_attempts == 1);
}

TEST_CASE("partial expiry") {
  TupleSpace space(1);
  space.put(task_tuple(0));
  space.put(task_tuple(1));
  auto a = space.take(Pattern{"app", TupleKind::Task, 0}, "w1", 5, 0);
  auto b = space.take(Pattern{"app", TupleKind::Task, 1}, "w2", 15, 0);
  REQUIRE(a);
  REQUIRE(b);
  auto reissued = space.expire(10);
  CHECK(reissued == std::vector<TaskId>{0});
  CHECK(space.snapshot().shadowed == 1);
}

TEST_CASE("read is pure and prefers completed results with lowest id") {
  TupleSpace space(1);
  CHECK(!space.read(Pattern{"app", TupleKind::Result, std::nullopt}).has_value());

  for (TaskId i = 0; i < 4; ++i) space.put(task_tuple(i));
  space.take(Pattern{"app", TupleKind::Task, 3}, "w1", 10, 0);
  space.take(Pattern{"app", TupleKind::Task, 1}, "w1", 10, 0);
  space.complete("app", 3, Bytes{3}, "w1", 1);
  space.complete("app", 1, Bytes{1}, "w1", 2);

  auto before = space.snapshot();
  auto r = space.read(Pattern{"app", TupleKind::Result, std::nullopt});
  REQUIRE(r.has_value());
  CHECK(r->key.task_id == 1);  // lowest-id tie-break
  auto after = space.snapshot();
  CHECK(before.pending == after.pending);
  CHECK(before.shadowed == after.shadowed);
  CHECK(before.completed == after.completed);
}

TEST_CASE("result tuple for a completed task is ignored on put") {
  TupleSpace space(1);
  space.put(task_tuple(0));
  space.take(any_task(), "w1", 10, 0);
  space.complete("app", 0, Bytes{9}, "w1", 1);

  Tuple r;
  r.key = TupleKey{"app", TupleKind::Result, 0, 0};
  r.payload = Bytes{100};
  CHECK(space.put(r) == PutOutcome::Ignored);
  CHECK(space.results("app")[0].payload == Bytes{9});
}

TEST_CASE("duplicate complete with differing payload raises a mismatch diagnostic") {
  TupleSpace space(1);
  space.put(task_tuple(0));
  space.take(any_task(), "w1", 10, 0);
  space.complete("app", 0, Bytes{1}, "w1", 1);
  CHECK(space.result_mismatches() == 0);
  space.complete("app", 0, Bytes{2}, "w2", 2);
  CHECK(space.result_mismatches() == 1);
  space.complete("app", 0, Bytes{1}, "w2", 3);
  CHECK(space.result_mismatches() == 1);
}

// Property suite: random take/expire/complete interleavings checked against
// the independent lifecycle model after every single operation.
TEST_CASE("random schedules preserve partition, exactly-once and monotone attempts") {
  Rng meta(2024);
  for (int schedule = 0; schedule < 2000; ++schedule) {
    const std::uint64_t seed = meta.next();
    Rng driver(derive_seed(seed, 1));
    TupleSpace space(derive_seed(seed, 2));
    smc_test::ModelSpace model(derive_seed(seed, 2));

    const int n_tasks = 1 + static_cast<int>(driver.bounded(32));
    for (TaskId i = 0; i < n_tasks; ++i) {
      space.put(task_tuple(i));
      model.put(i);
    }
    std::map<TaskId, int> accepted_count;
    std::map<TaskId, std::uint32_t> last_attempt;
    Tick now = 0;

    const int ops = 20 + static_cast<int>(driver.bounded(200));
    for (int op = 0; op < ops; ++op) {
      now += static_cast<Tick>(driver.bounded(5));
      switch (driver.bounded(4)) {
        case 0: {  // take
          const Tick lease = 1 + static_cast<Tick>(driver.bounded(10));
          auto got = space.take(any_task(), "w" + std::to_string(driver.bounded(4)),
                                lease, now);
          const std::int64_t predicted = model.take(now, lease);
          if (got) {
            CHECK(got->key.task_id == predicted);
            // attempts never decrease
            auto& seen = last_attempt[got->key.task_id];
            CHECK(got->key.attempt >= seen);
            seen = got->key.attempt;
          } else {
            CHECK(predicted == -1);
          }
          break;
        }
        case 1: {  // expire
          auto reissued = space.expire(now);
          CHECK(reissued == model.expire(now));
          CHECK(std::is_sorted(reissued.begin(), reissued.end()));
          break;
        }
        case 2:
        case 3: {  // complete a random task id (possibly unknown/dup)
          const TaskId id = static_cast<TaskId>(driver.bounded(n_tasks + 2));
          auto outcome = space.complete("app", id, Bytes{1}, "w", now);
          const bool predicted_first = model.complete(id);
          CHECK((outcome == AcceptOutcome::AcceptedFirst) == predicted_first);
          if (outcome == AcceptOutcome::AcceptedFirst) accepted_count[id] += 1;
          break;
        }
      }
      // Partition invariant after every operation.
      auto s = space.snapshot();
      CHECK(s.pending + s.shadowed + s.completed == n_tasks);
      CHECK(s.total_attempts >= 0);
    }
    for (const auto& [id, count] : accepted_count) CHECK(count == 1);
  }
}

TEST_CASE("identical op sequences with identical seeds are byte-identical") {
  auto run = [](std::uint64_t seed) {
    TupleSpace space(seed);
    for (TaskId i = 0; i < 6; ++i) space.put(task_tuple(i));
    std::string log;
    for (int i = 0; i < 4; ++i) {
      auto t = space.take(any_task(), "w1", 7, i);
      if (t) log += std::to_string(t->key.task_id);
    }
    space.expire(8);
    space.complete("app", 2, Bytes{2}, "w1", 9);
    auto s = space.snapshot();
    log += "|" + TupleSpace::snapshot_csv_row(9, s);
    return log;
  };
  CHECK(run(5) == run(5));
}
