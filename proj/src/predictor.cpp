#include "phcsim/predictor.hpp"

#include <cmath>

namespace phcsim {

namespace {

// Adaptive Simpson quadrature.
double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson(const F& f, double a, double m, double b, double fa,
                        double fm, double fb, double whole, double eps,
                        int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(fa, flm, fm, a, m);
  double right = simpson(fm, frm, fb, m, b);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * eps,
                          depth - 1) +
         adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * eps,
                          depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double eps) {
  if (b <= a) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson(f, a, m, b, fa, fm, fb, simpson(fa, fm, fb, a, b),
                          eps, 48);
}

}  // namespace

double remaining_time_approx(const ServiceDistribution& dist, double elapsed,
                             PredictorDiagnostics* diag) {
  double b = dist.upper_b();
  if (elapsed > b) {
    if (diag) ++diag->elapsed_beyond_b;
    return 0.0;
  }
  if (elapsed < dist.median()) return dist.median() - elapsed;
  if (elapsed < dist.q75()) return dist.q75() - elapsed;
  return 0.5 * (b - elapsed);
}

double remaining_time_exact(const ServiceDistribution& dist, double elapsed) {
  double survival_at_x = 1.0 - dist.cdf(elapsed);
  if (survival_at_x <= 1e-12) return 0.0;
  // E[T - x | T > x] = integral_x^inf (1 - G(t)) dt / (1 - G(x)).
  double upper = dist.support_upper();
  if (std::isinf(upper)) upper = elapsed + 50.0 * dist.mean();
  auto survival = [&](double t) { return 1.0 - dist.cdf(t); };
  double integral =
      integrate(survival, elapsed, upper, 1e-9 * survival_at_x * dist.mean());
  return integral / survival_at_x;
}

double delay_now(const FacilitySnapshot::Entry& entry,
                 PredictorDiagnostics* diag) {
  double residual = entry.in_service_elapsed
                        ? remaining_time_approx(entry.dist,
                                                *entry.in_service_elapsed, diag)
                        : 0.0;
  return entry.queue_len * entry.mean_service + residual;
}

double queue_length_at(const FacilitySnapshot::Entry& entry, double delta,
                       double lambda_hat, PredictorDiagnostics* diag) {
  double residual_now =
      entry.in_service_elapsed
          ? remaining_time_approx(entry.dist, *entry.in_service_elapsed, diag)
          : 0.0;
  double expected_arrivals = lambda_hat * delta;
  double servable =
      std::floor(std::max((delta - residual_now) / entry.mean_service, 0.0));
  double q = entry.queue_len + (expected_arrivals - 1.0) - servable;
  return q > 0.0 ? q : 0.0;
}

double residual_at(const FacilitySnapshot::Entry& entry, double delta,
                   PredictorDiagnostics* diag) {
  if (!entry.in_service_elapsed) return 0.0;
  double residual_now =
      remaining_time_approx(entry.dist, *entry.in_service_elapsed, diag);
  if (delta < residual_now) return residual_now - delta;
  // The in-service patient at t+delta has been in service for the
  // remainder of (delta - r_e) / E[s].
  double elapsed = std::fmod(delta - residual_now, entry.mean_service);
  return remaining_time_approx(entry.dist, elapsed, diag);
}

double los_subsystem_at(const FacilitySnapshot::Entry& entry, double delta,
                        double lambda_hat, PredictorDiagnostics* diag) {
  double delay = queue_length_at(entry, delta, lambda_hat, diag) *
                     entry.mean_service +
                 residual_at(entry, delta, diag);
  return delay + entry.mean_service;
}

LosPrediction predict_total_los(const FacilitySnapshot& snap,
                                double travel_minutes,
                                PredictorDiagnostics* diag) {
  LosPrediction pred;
  pred.facility = snap.facility;
  pred.decision_time = snap.t;
  pred.travel_minutes = travel_minutes;
  double delta = travel_minutes;
  for (int i = 0; i < kNumSubsystems; ++i) {
    double los = los_subsystem_at(snap.subs[i], delta, snap.lambda_hat, diag);
    pred.per_subsystem[i] = los;
    pred.total += los;
    delta += los;
  }
  return pred;
}

}  // namespace phcsim
