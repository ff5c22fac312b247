#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smc/report.hpp"

using namespace smc;

namespace {

const char* kGoodConfig = R"({
  "app": "matmul",
  "n": 64,
  "workers": [
    {"worker_id": "w0", "speed_factor": 1.0, "link_delay": 0},
    {"worker_id": "w1", "speed_factor": 2.0, "link_delay": 1}
  ],
  "masters_k": 2,
  "grain_mode": "fixed",
  "grain": 8,
  "fault_plan": {
    "seed": 11,
    "msg_loss_prob": 0.05,
    "crash_events": [{"worker_id": "w0", "crash_tick": 3, "recover_tick": 9}],
    "per_step_crash_prob": 0.0
  },
  "run_seed": 42,
  "tick_budget": 1000
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parses and round-trips field for field") {
  RunConfig cfg = parse_run_config(kGoodConfig);
  CHECK(cfg.app == "matmul");
  CHECK(cfg.n == 64);
  CHECK(cfg.workers.size() == 2);
  CHECK(cfg.workers[1].link_delay == kTickScale);
  CHECK(cfg.masters_k == 2);
  CHECK(cfg.grain == 8);
  CHECK(cfg.fault_plan.seed == 11);
  REQUIRE(cfg.fault_plan.crash_events.size() == 1);
  CHECK(cfg.fault_plan.crash_events[0].crash_at == 3 * kTickScale);
  CHECK(cfg.tick_budget == 1000 * kTickScale);

  RunConfig again = parse_run_config(serialize_run_config(cfg));
  CHECK(serialize_run_config(again) == serialize_run_config(cfg));
}

TEST_CASE("config errors name the offending field") {
  CHECK_THROWS_WITH_AS(parse_run_config("{"), doctest::Contains("malformed JSON"),
                       ConfigError);

  auto expect_field = [](const std::string& json, const char* needle) {
    try {
      parse_run_config(json);
      FAIL_CHECK("expected ConfigError for: " << needle);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_field(R"({"n": 4})", "app");
  expect_field(R"({"app": "matmul"})", "n");
  expect_field(
      R"({"app": "nope", "n": 4, "workers": [{"worker_id":"w","speed_factor":1}],
          "fault_plan": {"seed": 1}, "run_seed": 2})",
      "unknown application");
  // an absent seed is an error, never an implicit default
  expect_field(
      R"({"app": "matmul", "n": 4, "workers": [{"worker_id":"w","speed_factor":1}],
          "fault_plan": {"msg_loss_prob": 0}, "run_seed": 2})",
      "seed");
  expect_field(
      R"({"app": "matmul", "n": 4, "workers": [{"worker_id":"w","speed_factor":1}],
          "fault_plan": {"seed": 1}})",
      "run_seed");
}

TEST_CASE("reliability profile parsing") {
  ReliabilityProfile p = parse_reliability_profile(
      R"({"scales":[2,4,8],"per_msg_loss_prob":0.001,"trials":100,"base_seed":7})");
  CHECK(p.scales == std::vector<int>{2, 4, 8});
  CHECK(p.trials == 100);
  CHECK_THROWS_AS(parse_reliability_profile(
                      R"({"scales":[4,2],"per_msg_loss_prob":0,"trials":1,"base_seed":7})"),
                  ConfigError);
  const std::string s = serialize_reliability_profile(p);
  CHECK(serialize_reliability_profile(parse_reliability_profile(s)) == s);
}

TEST_CASE("atomic csv append creates header once and never leaves partial files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "smc_report_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string path = (dir / "runs.csv").string();

  atomic_append_csv(path, kRunCsvHeader, "a,b");
  atomic_append_csv(path, kRunCsvHeader, "c,d");
  const std::string content = slurp(path);
  CHECK(content == std::string(kRunCsvHeader) + "\na,b\nc,d\n");
  CHECK(!fs::exists(path + ".tmp"));

  // Writing into a missing directory fails without touching the target.
  CHECK_THROWS(atomic_write_file((dir / "nope" / "x.csv").string(), "data"));
  CHECK(!fs::exists(dir / "nope"));
  fs::remove_all(dir);
}

TEST_CASE("run csv row layout") {
  RunConfig cfg = parse_run_config(kGoodConfig);
  RunReport report;
  report.status = RunStatus::Success;
  report.makespan = 10 * kTickScale;
  report.retransmissions = 3;
  report.result_digest = 0xabcULL;
  const std::string row = run_csv_row("matmul-42", cfg, 8, 8, report);
  CHECK(row == "matmul-42,fixed,42,2,8,8,Success,10.000000,3,0000000000000abc");
}
