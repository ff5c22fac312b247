#include "smc/reliability.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "smc/rng.hpp"

namespace smc {

double vc_success_analytic(std::int64_t message_count, double p) {
  if (message_count < 0) throw std::invalid_argument("message count must be >= 0");
  return std::pow(1.0 - p, static_cast<double>(message_count));
}

ReliabilityCurve sweep(const ReliabilityProfile& profile) {
  if (profile.scales.empty()) throw std::invalid_argument("scales must be non-empty");
  if (profile.trials < 1) throw std::invalid_argument("trials must be positive");

  ReliabilityCurve curve;
  for (int scale : profile.scales) {
    const std::int64_t n = static_cast<std::int64_t>(scale) * profile.tasks_per_worker;
    const auto app = make_application("monte_carlo_pi", profile.base_seed, n);

    std::vector<WorkerSpec> workers;
    workers.reserve(static_cast<std::size_t>(scale));
    for (int w = 0; w < scale; ++w)
      workers.push_back(WorkerSpec{"w" + std::to_string(w), 1.0, 0});

    struct TrialOutcome {
      bool vc_ok = false;
      bool smc_ok = false;
      Tick smc_makespan = 0;
    };
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(profile.trials));

    auto run_trial = [&](int trial) {
      SmcRunParams params;
      params.app = app.get();
      params.total_units = n;
      params.workers = workers;
      params.grain_mode = GrainMode::FixedGrain;
      params.grain = 1;
      params.fault_plan.seed =
          derive_seed(profile.base_seed, static_cast<std::uint64_t>(scale),
                      static_cast<std::uint64_t>(trial));
      params.fault_plan.msg_loss_prob = profile.per_msg_loss_prob;
      params.run_seed = derive_seed(profile.base_seed, 0x5eed);
      params.tick_budget = profile.tick_budget;

      const VcRunOutcome vc = vc_run(params);
      const RunReport smc = smc_run(params);
      TrialOutcome& out = outcomes[static_cast<std::size_t>(trial)];
      out.vc_ok = vc.status == VcStatus::Success;
      out.smc_ok = smc.status == RunStatus::Success;
      out.smc_makespan = smc.makespan;
    };

    const unsigned n_threads =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(profile.trials)));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < profile.trials; i = next.fetch_add(1))
          run_trial(i);
      });
    }
    for (auto& t : pool) t.join();

    ReliabilityRow row;
    row.scale = scale;
    std::int64_t vc_ok = 0, smc_ok = 0;
    double makespan_sum = 0;
    for (const TrialOutcome& o : outcomes) {
      vc_ok += o.vc_ok;
      smc_ok += o.smc_ok;
      if (o.smc_ok) makespan_sum += to_config_ticks(o.smc_makespan);
    }
    row.vc_success = static_cast<double>(vc_ok) / profile.trials;
    row.smc_success = static_cast<double>(smc_ok) / profile.trials;
    row.vc_analytic =
        vc_success_analytic(vc_message_count(n), profile.per_msg_loss_prob);
    row.mean_smc_makespan = smc_ok > 0 ? makespan_sum / static_cast<double>(smc_ok) : 0.0;
    curve.rows.push_back(row);
  }
  return curve;
}

std::string reliability_csv(const ReliabilityCurve& curve) {
  std::string out = "scale,vc_success,smc_success,vc_analytic,mean_smc_makespan\n";
  char buf[160];
  for (const ReliabilityRow& r : curve.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f\n", r.scale, r.vc_success,
                  r.smc_success, r.vc_analytic, r.mean_smc_makespan);
    out += buf;
  }
  return out;
}

}  // namespace smc
