#pragma once

#include <array>
#include <cstdint>

#include "phcsim/facility.hpp"

namespace phcsim {

struct PredictorDiagnostics {
  // Elapsed service time observed beyond the predictor's upper limit b;
  // the residual is clamped to zero when this happens.
  std::uint64_t elapsed_beyond_b = 0;
};

struct LosPrediction {
  int facility = 0;
  double decision_time = 0;
  double travel_minutes = 0;
  std::array<double, kNumSubsystems> per_subsystem{};
  double total = 0;
};

// Piecewise residual-service-time predictor, driven by the elapsed
// service time x of the patient currently in service:
//   x < q50        -> q50 - x
//   q50 <= x < q75 -> q75 - x
//   q75 <= x <= b  -> (b - x) / 2
// x beyond b is clamped to zero (possible when b is the 0.99 quantile
// and the realized draw exceeds it).
double remaining_time_approx(const ServiceDistribution& dist, double elapsed,
                             PredictorDiagnostics* diag = nullptr);

// Exact conditional expectation E[T - x | T > x], by numerical
// integration of the conditional survival function (relative accuracy
// 1e-6). Returns 0 when cdf(x) >= 1 - 1e-12.
double remaining_time_exact(const ServiceDistribution& dist, double elapsed);

// Delay at the snapshot instant: queue_len * E[s] plus the residual of
// the in-service patient (zero if the server is idle).
double delay_now(const FacilitySnapshot::Entry& entry,
                 PredictorDiagnostics* diag = nullptr);

// Expected queue length delta minutes after the snapshot, given the
// observed arrival rate. Real-valued, clamped at zero.
double queue_length_at(const FacilitySnapshot::Entry& entry, double delta,
                       double lambda_hat, PredictorDiagnostics* diag = nullptr);

// Residual service time delta minutes after the snapshot.
double residual_at(const FacilitySnapshot::Entry& entry, double delta,
                   PredictorDiagnostics* diag = nullptr);

// Subsystem length of stay for a patient arriving delta minutes after
// the snapshot: extrapolated delay plus one mean service.
double los_subsystem_at(const FacilitySnapshot::Entry& entry, double delta,
                        double lambda_hat,
                        PredictorDiagnostics* diag = nullptr);

// Total facility LOS for a patient arriving travel_minutes after the
// snapshot. Visits all four stations in flow order, advancing the
// arrival offset by each station's predicted stay; the same observed
// arrival rate applies at every station.
LosPrediction predict_total_los(const FacilitySnapshot& snap,
                                double travel_minutes,
                                PredictorDiagnostics* diag = nullptr);

}  // namespace phcsim
