#include "phcsim/facility.hpp"

#include <stdexcept>

namespace phcsim {

double arrival_rate_estimate(const std::vector<double>& arrival_times, double t,
                             double window) {
  if (t <= 0) return 0.0;
  double horizon = t < window ? t : window;
  double cutoff = t - horizon;
  std::size_t n = 0;
  for (auto it = arrival_times.rbegin(); it != arrival_times.rend(); ++it) {
    if (*it <= cutoff) break;
    ++n;
  }
  return static_cast<double>(n) / horizon;
}

FacilitySnapshot snapshot(const Facility& f, double t, double window) {
  FacilitySnapshot snap;
  snap.facility = f.index;
  snap.t = t;
  snap.lambda_hat = arrival_rate_estimate(f.arrival_times, t, window);
  for (int i = 0; i < kNumSubsystems; ++i) {
    const Subsystem& s = f.subsystems[i];
    auto& e = snap.subs[i];
    e.queue_len = s.queue_length();
    if (s.in_service) e.in_service_elapsed = t - s.in_service->start_time;
    e.mean_service = s.service.mean();
    e.dist = s.service;
  }
  return snap;
}

SubsystemId first_subsystem(const Patient& p) {
  return p.needs_ncd ? SubsystemId::Ncd : SubsystemId::Doc;
}

std::optional<SubsystemId> route_after(SubsystemId s, const Patient& p) {
  switch (s) {
    case SubsystemId::Ncd:
      return SubsystemId::Doc;
    case SubsystemId::Doc:
      return p.needs_lab ? SubsystemId::Lab : SubsystemId::Pharmacy;
    case SubsystemId::Lab:
      return SubsystemId::Pharmacy;
    case SubsystemId::Pharmacy:
      return std::nullopt;
  }
  throw std::logic_error("route_after: unknown subsystem");
}

}  // namespace phcsim
