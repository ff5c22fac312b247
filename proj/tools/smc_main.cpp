#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "smc/config.hpp"
#include "smc/report.hpp"
#include "smc/tune.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitMismatch = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw smc::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            std::optional<std::uint64_t> seed_override) {
  smc::RunConfig cfg = smc::parse_run_config(read_file(config_path));
  if (seed_override) cfg.run_seed = *seed_override;
  const std::string out_path = !out_override.empty() ? out_override
                               : !cfg.output_path.empty() ? cfg.output_path
                                                          : "runs.csv";

  auto app = smc::make_application(cfg.app, cfg.run_seed, cfg.n);
  smc::SmcRunParams params = smc::to_run_params(cfg, *app);

  std::int64_t grain = cfg.grain;
  if (cfg.grain_mode == smc::GrainMode::Tuned) {
    const smc::TuneResult tuned = smc::tune(*app, cfg.workers, cfg.fault_plan, cfg.n,
                                            cfg.run_seed, cfg.tick_budget);
    grain = tuned.best_grain;
    params.grain_mode = smc::GrainMode::FixedGrain;
    params.grain = grain;
  } else if (cfg.grain_mode == smc::GrainMode::StaticNP) {
    grain = (cfg.n + static_cast<std::int64_t>(cfg.workers.size()) - 1) /
            static_cast<std::int64_t>(cfg.workers.size());
  }

  const smc::RunReport report = smc::smc_run(params);
  if (report.status == smc::RunStatus::Unsupported) {
    std::cerr << "refused: " << smc::stability_name(app->stability())
              << " does not support " << cfg.masters_k << " redundant masters\n";
    return kExitUnsupported;
  }

  const std::int64_t tasks =
      params.grain_mode == smc::GrainMode::StaticNP
          ? static_cast<std::int64_t>(cfg.workers.size())
          : (cfg.n + params.grain - 1) / params.grain;
  const std::string run_id = cfg.app + "-" + std::to_string(cfg.run_seed);
  smc::atomic_append_csv(out_path, smc::kRunCsvHeader,
                         smc::run_csv_row(run_id, cfg, tasks, grain, report));

  switch (report.status) {
    case smc::RunStatus::Timeout:
      std::cerr << "run timed out\n";
      return kExitTimeout;
    case smc::RunStatus::Mismatch:
      std::cerr << "redundant masters produced mismatching Det-output answers\n";
      return kExitMismatch;
    case smc::RunStatus::Success:
      if (!report.verified) {
        std::cerr << "answer failed verification\n";
        return kExitMismatch;
      }
      std::cout << "ok makespan=" << smc::to_config_ticks(report.makespan)
                << " retransmissions=" << report.retransmissions
                << " digest=" << smc::digest_hex(report.result_digest) << "\n";
      return kExitOk;
    default:
      return kExitUnsupported;
  }
}

int cmd_tune(const std::string& config_path, const std::string& out_override,
             std::optional<std::uint64_t> seed_override) {
  smc::RunConfig cfg = smc::parse_run_config(read_file(config_path));
  if (seed_override) cfg.run_seed = *seed_override;
  const std::string out_path = out_override.empty() ? "tune.csv" : out_override;
  auto app = smc::make_application(cfg.app, cfg.run_seed, cfg.n);
  const smc::TuneResult result =
      smc::tune(*app, cfg.workers, cfg.fault_plan, cfg.n, cfg.run_seed, cfg.tick_budget);
  smc::atomic_write_file(out_path, smc::tune_csv(result));
  std::cout << "best_grain=" << result.best_grain
            << " improvement_vs_np=" << result.improvement_vs_np << "\n";
  return kExitOk;
}

int cmd_mtbf(const std::string& config_path, const std::string& out_override,
             std::optional<std::uint64_t> seed_override) {
  smc::ReliabilityProfile profile = smc::parse_reliability_profile(read_file(config_path));
  if (seed_override) profile.base_seed = *seed_override;
  const std::string out_path = out_override.empty() ? "mtbf.csv" : out_override;
  const smc::ReliabilityCurve curve = smc::sweep(profile);
  smc::atomic_write_file(out_path, smc::reliability_csv(curve));
  std::cout << "wrote " << curve.rows.size() << " rows to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"statistic-multiplexed computing runtime and fault simulator"};
  cli.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed_override;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "JSON config file");
    if (config_required) opt->required();
    sub->add_option("--out", out_path, "output file path");
    sub->add_option("--seed", seed_override, "override the config seed");
  };

  CLI::App* run = cli.add_subcommand("run", "execute one configured run");
  add_common(run, true);
  CLI::App* tune = cli.add_subcommand("tune", "sweep grain sizes against the N/P baseline");
  add_common(tune, true);
  CLI::App* mtbf = cli.add_subcommand("mtbf", "vc vs smc reliability sweep over scales");
  add_common(mtbf, true);
  CLI::App* list = cli.add_subcommand("list-apps", "list built-in applications");
  (void)list;

  CLI11_PARSE(cli, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path, seed_override);
    if (tune->parsed()) return cmd_tune(config_path, out_path, seed_override);
    if (mtbf->parsed()) return cmd_mtbf(config_path, out_path, seed_override);
    if (list->parsed()) {
      for (const smc::AppInfo& info : smc::builtin_applications())
        std::cout << info.name << "," << smc::stability_name(info.stability) << "\n";
      return kExitOk;
    }
  } catch (const smc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
