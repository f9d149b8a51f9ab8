#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phcsim/distributions.hpp"

namespace phcsim {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Stable single-station M/G/1 run vs the Pollaczek-Khinchine mean queue
// wait computed from the service distribution's exact first two moments.
// Arrival rate 0.2/min, service truncated_normal(3.451, 0.873);
// tolerance 3% over at least `min_served` post-warm-up waits.
CheckResult pollaczek_khinchine_check(std::uint64_t seed = 7,
                                      std::uint64_t min_served = 1000000);

// Little's-law accounting: time-integrated queue length vs the sum of
// per-patient waits, per subsystem, over many drained sessions of a
// lightly loaded facility. The two totals are computed by independent
// code paths and must agree within 2%.
CheckResult littles_law_check(std::uint64_t seed = 7, int days = 200);

// |cdf(quantile(p)) - p| < 1e-9 on a p-grid, for every bundled
// distribution shape.
CheckResult quantile_roundtrip_check();

struct ResidualGapRow {
  std::string dist;
  double mean_abs_gap = 0;  // mean |piecewise - exact| over the x-grid
  double dist_mean = 0;     // acceptance bound for the gap
  bool ok = false;
};

// Piecewise conditional-residual approximation vs exact numerical
// integration, on a 200-point elapsed-time grid up to quantile(0.95).
std::vector<ResidualGapRow> residual_gap_table();
CheckResult residual_gap_check();

std::vector<CheckResult> run_all_checks();

}  // namespace phcsim
