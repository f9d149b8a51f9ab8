#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phcsim/config.hpp"
#include "phcsim/sim.hpp"

namespace phcsim {

// Server utilization over one OPD session; values above 1 mean the
// server kept draining its queue past the session window.
double utilization(double busy_minutes,
                   double session_minutes = kOpdWindowMinutes);

// Percentage difference |v1 - v2| / max(v1, v2) * 100; 0 when both are 0.
double disparity(double v1, double v2);

struct MapeResult {
  double percent = 0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // pairs dropped because actual <= 0
};

// Mean absolute percentage error over (actual, predicted) pairs.
MapeResult mape(const std::vector<std::pair<double, double>>& pairs);

struct FacilityOutcomes {
  std::array<double, kNumSubsystems> rho{};   // mean per-day utilization
  std::array<double, kNumSubsystems> wait{};  // mean queue wait, minutes
  double los = 0;                             // mean length of stay, minutes
  std::optional<double> mape;  // percent; absent without usable pairs
  std::uint64_t mape_excluded = 0;
};

struct ReplicationStats {
  int replication = 0;
  std::vector<FacilityOutcomes> facilities;
  double beta = 0;  // % of retained-period patients who were diverted
  std::uint64_t patients = 0;
  std::uint64_t diverted = 0;
  std::uint64_t predictor_clamps = 0;  // elapsed-beyond-b clamp events
};

// Fresh per-replication network with streams derived from
// (master seed, replication index) and per-facility labels.
SimState make_sim_state(const ScenarioConfig& cfg, int replication);

// Simulates horizon_days independent OPD sessions and aggregates the
// days after the warm-up cutoff.
ReplicationStats run_replication(const ScenarioConfig& cfg,
                                 const DiversionPolicy& policy,
                                 int replication, TraceSink* trace = nullptr);

struct Aggregate {
  double mean = 0;
  double sd = 0;  // sample standard deviation; 0 when n < 2
  std::size_t n = 0;
};

Aggregate aggregate(const std::vector<double>& xs);

struct PolicyReport {
  std::string policy;
  std::vector<ReplicationStats> replications;
  // Parallel to ScenarioReport::outcome_names; absent when the outcome
  // is undefined for this policy (e.g. MAPE without a predictor).
  std::vector<std::optional<Aggregate>> outcomes;
};

struct ScenarioReport {
  ScenarioConfig config;
  std::uint64_t digest = 0;
  std::vector<std::string> outcome_names;  // canonical row order
  std::vector<PolicyReport> policies;
};

// Canonical outcome rows: per-facility utilizations/waits/LOS, the
// two-facility disparity block, beta, then per-facility MAPE.
std::vector<std::string> canonical_outcomes(const ScenarioConfig& cfg);

// Runs every configured policy for R replications each. Replications
// execute on `jobs` threads (0 = all processors) and aggregate in
// replication order, so results do not depend on the thread count.
// `trace`, when set, receives the events of replication 0 only.
ScenarioReport run_scenario(const ScenarioConfig& cfg, int jobs = 0,
                            TraceSink* trace = nullptr);

std::string report_csv(const ScenarioReport& report);
std::string report_summary(const ScenarioReport& report);

}  // namespace phcsim
