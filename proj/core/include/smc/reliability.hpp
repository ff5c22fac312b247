#ifndef SMC_RELIABILITY_HPP
#define SMC_RELIABILITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "smc/simulation.hpp"

namespace smc {

struct ReliabilityProfile {
  std::vector<int> scales;           // worker counts, strictly increasing
  double per_msg_loss_prob = 0.0;
  int trials = 100;
  std::uint64_t base_seed = 0;
  Tick tick_budget = 0;              // subticks; 0 = generous default
  std::int64_t tasks_per_worker = 4; // fixed work per worker, so messages scale
};

struct ReliabilityRow {
  int scale = 0;
  double vc_success = 0.0;
  double smc_success = 0.0;
  double vc_analytic = 0.0;
  double mean_smc_makespan = 0.0;  // config ticks, over successful smc runs
};

struct ReliabilityCurve {
  std::vector<ReliabilityRow> rows;
};

// Closed-form Bernoulli product: P(all M messages survive) = (1-p)^M.
double vc_success_analytic(std::int64_t message_count, double p);

// For each scale, runs `trials` seeded vc/smc pairs on identical fault
// plans. Trials are independent given derived seeds and run across threads;
// merge is by index so the output is order-independent.
ReliabilityCurve sweep(const ReliabilityProfile& profile);

std::string reliability_csv(const ReliabilityCurve& curve);

}  // namespace smc

#endif
