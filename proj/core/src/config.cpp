#include "smc/config.hpp"

#include <nlohmann/json.hpp>

namespace smc {

using nlohmann::json;

namespace {

json require(const json& j, const char* field) {
  if (!j.contains(field)) throw ConfigError(std::string("missing field: ") + field);
  return j.at(field);
}

GrainMode parse_grain_mode(const std::string& s) {
  if (s == "static_np") return GrainMode::StaticNP;
  if (s == "fixed") return GrainMode::FixedGrain;
  if (s == "tuned") return GrainMode::Tuned;
  throw ConfigError("grain_mode must be one of static_np|fixed|tuned, got: " + s);
}

FaultPlan parse_fault_plan(const json& j) {
  FaultPlan plan;
  plan.seed = require(j, "seed").get<std::uint64_t>();
  plan.msg_loss_prob = j.value("msg_loss_prob", 0.0);
  if (plan.msg_loss_prob < 0.0 || plan.msg_loss_prob > 1.0)
    throw ConfigError("fault_plan.msg_loss_prob must be in [0,1]");
  plan.per_step_crash_prob = j.value("per_step_crash_prob", 0.0);
  if (plan.per_step_crash_prob < 0.0 || plan.per_step_crash_prob > 1.0)
    throw ConfigError("fault_plan.per_step_crash_prob must be in [0,1]");
  for (const json& e : j.value("crash_events", json::array())) {
    CrashEvent ev;
    ev.agent_id = require(e, "worker_id").get<std::string>();
    ev.crash_at = scale_ticks(require(e, "crash_tick").get<double>());
    if (e.contains("recover_tick") && !e.at("recover_tick").is_null()) {
      ev.recover_at = scale_ticks(e.at("recover_tick").get<double>());
      if (*ev.recover_at <= ev.crash_at)
        throw ConfigError("fault_plan.crash_events: crash_tick must precede recover_tick");
    }
    plan.crash_events.push_back(std::move(ev));
  }
  return plan;
}

json fault_plan_json(const FaultPlan& plan) {
  json j;
  j["seed"] = plan.seed;
  j["msg_loss_prob"] = plan.msg_loss_prob;
  j["per_step_crash_prob"] = plan.per_step_crash_prob;
  j["crash_events"] = json::array();
  for (const CrashEvent& ev : plan.crash_events) {
    json e;
    e["worker_id"] = ev.agent_id;
    e["crash_tick"] = to_config_ticks(ev.crash_at);
    if (ev.recover_at)
      e["recover_tick"] = to_config_ticks(*ev.recover_at);
    else
      e["recover_tick"] = nullptr;
    j["crash_events"].push_back(std::move(e));
  }
  return j;
}

}  // namespace

const char* grain_mode_name(GrainMode m) {
  switch (m) {
    case GrainMode::StaticNP: return "static_np";
    case GrainMode::FixedGrain: return "fixed";
    case GrainMode::Tuned: return "tuned";
  }
  return "?";
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  RunConfig cfg;
  cfg.app = require(j, "app").get<std::string>();
  cfg.n = require(j, "n").get<std::int64_t>();
  if (cfg.n < 1) throw ConfigError("n must be positive");

  const json workers = require(j, "workers");
  if (!workers.is_array() || workers.empty())
    throw ConfigError("workers must be a non-empty array");
  for (const json& w : workers) {
    WorkerSpec spec;
    spec.worker_id = require(w, "worker_id").get<std::string>();
    spec.speed_factor = require(w, "speed_factor").get<double>();
    if (spec.speed_factor <= 0.0) throw ConfigError("workers.speed_factor must be > 0");
    spec.link_delay = scale_ticks(w.value("link_delay", 0.0));
    if (spec.link_delay < 0) throw ConfigError("workers.link_delay must be >= 0");
    cfg.workers.push_back(std::move(spec));
  }

  cfg.masters_k = j.value("masters_k", 1);
  if (cfg.masters_k < 1) throw ConfigError("masters_k must be >= 1");
  cfg.grain_mode = parse_grain_mode(j.value("grain_mode", std::string("fixed")));
  cfg.grain = j.value("grain", std::int64_t{1});
  if (cfg.grain_mode == GrainMode::FixedGrain && (cfg.grain < 1 || cfg.grain > cfg.n))
    throw ConfigError("grain must satisfy 1 <= grain <= n");

  cfg.fault_plan = parse_fault_plan(require(j, "fault_plan"));
  cfg.run_seed = require(j, "run_seed").get<std::uint64_t>();
  cfg.tick_budget = scale_ticks(j.value("tick_budget", 0.0));
  if (j.contains("lease_len")) cfg.lease_len = scale_ticks(j.at("lease_len").get<double>());
  cfg.output_path = j.value("output_path", std::string{});

  bool known = false;
  for (const AppInfo& info : builtin_applications()) known |= info.name == cfg.app;
  if (!known) throw ConfigError("app: unknown application name: " + cfg.app);
  return cfg;
}

std::string serialize_run_config(const RunConfig& cfg) {
  json j;
  j["app"] = cfg.app;
  j["n"] = cfg.n;
  j["workers"] = json::array();
  for (const WorkerSpec& w : cfg.workers) {
    j["workers"].push_back({{"worker_id", w.worker_id},
                            {"speed_factor", w.speed_factor},
                            {"link_delay", to_config_ticks(w.link_delay)}});
  }
  j["masters_k"] = cfg.masters_k;
  j["grain_mode"] = grain_mode_name(cfg.grain_mode);
  j["grain"] = cfg.grain;
  j["fault_plan"] = fault_plan_json(cfg.fault_plan);
  j["run_seed"] = cfg.run_seed;
  j["tick_budget"] = to_config_ticks(cfg.tick_budget);
  if (cfg.lease_len) j["lease_len"] = to_config_ticks(*cfg.lease_len);
  if (!cfg.output_path.empty()) j["output_path"] = cfg.output_path;
  return j.dump(2) + "\n";
}

ReliabilityProfile parse_reliability_profile(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  ReliabilityProfile p;
  for (const json& s : require(j, "scales")) p.scales.push_back(s.get<int>());
  if (p.scales.empty()) throw ConfigError("scales must be non-empty");
  for (std::size_t i = 1; i < p.scales.size(); ++i) {
    if (p.scales[i] <= p.scales[i - 1])
      throw ConfigError("scales must be strictly increasing");
  }
  p.per_msg_loss_prob = require(j, "per_msg_loss_prob").get<double>();
  if (p.per_msg_loss_prob < 0.0 || p.per_msg_loss_prob > 1.0)
    throw ConfigError("per_msg_loss_prob must be in [0,1]");
  p.trials = require(j, "trials").get<int>();
  if (p.trials < 1) throw ConfigError("trials must be positive");
  p.base_seed = require(j, "base_seed").get<std::uint64_t>();
  p.tick_budget = scale_ticks(j.value("tick_budget", 0.0));
  p.tasks_per_worker = j.value("tasks_per_worker", std::int64_t{4});
  if (p.tasks_per_worker < 1) throw ConfigError("tasks_per_worker must be positive");
  return p;
}

std::string serialize_reliability_profile(const ReliabilityProfile& p) {
  json j;
  j["scales"] = p.scales;
  j["per_msg_loss_prob"] = p.per_msg_loss_prob;
  j["trials"] = p.trials;
  j["base_seed"] = p.base_seed;
  j["tick_budget"] = to_config_ticks(p.tick_budget);
  j["tasks_per_worker"] = p.tasks_per_worker;
  return j.dump(2) + "\n";
}

SmcRunParams to_run_params(const RunConfig& cfg, const Application& app) {
  SmcRunParams params;
  params.app = &app;
  params.total_units = cfg.n;
  params.workers = cfg.workers;
  params.masters_k = cfg.masters_k;
  params.grain_mode = cfg.grain_mode;
  params.grain = cfg.grain;
  params.fault_plan = cfg.fault_plan;
  params.run_seed = cfg.run_seed;
  params.tick_budget = cfg.tick_budget;
  if (cfg.lease_len) params.lease_len = *cfg.lease_len;
  return params;
}

}  // namespace smc
