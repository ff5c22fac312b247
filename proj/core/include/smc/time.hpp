#ifndef SMC_TIME_HPP
#define SMC_TIME_HPP

#include <cmath>
#include <cstdint>

namespace smc {

// Logical simulation time. All event timestamps are integral subticks;
// one configured "tick" equals kTickScale subticks so that fractional
// work rates (speed_factor in work-units per tick) stay representable
// without floating-point time.
using Tick = std::int64_t;

inline constexpr Tick kTickScale = 1024;

inline Tick scale_ticks(double config_ticks) {
  return static_cast<Tick>(std::llround(config_ticks * static_cast<double>(kTickScale)));
}

inline double to_config_ticks(Tick t) {
  return static_cast<double>(t) / static_cast<double>(kTickScale);
}

// Duration of `units` work units on a worker running at `speed` units/tick.
inline Tick compute_duration(std::int64_t units, double speed) {
  return static_cast<Tick>(
      std::ceil(static_cast<double>(units) * static_cast<double>(kTickScale) / speed));
}

}  // namespace smc

#endif
