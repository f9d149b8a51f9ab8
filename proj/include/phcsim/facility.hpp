#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "phcsim/des.hpp"
#include "phcsim/distributions.hpp"

namespace phcsim {

inline constexpr double kOpdWindowMinutes = 360.0;  // six-hour OPD session

struct Patient {
  struct SubVisit {
    double enqueue = -1;
    double start = -1;
    double end = -1;
    bool visited() const { return end >= 0; }
    double wait() const { return start - enqueue; }
    double service() const { return end - start; }
  };

  int id = -1;
  int origin_facility = 0;
  int chosen_facility = 0;
  double decision_time = 0;
  bool needs_ncd = false;
  bool needs_lab = false;
  bool diverted = false;
  double facility_arrival = -1;
  double exit_time = -1;
  double realized_los = -1;
  std::array<SubVisit, kNumSubsystems> visits;
  // Estimate for the chosen facility at decision time; -1 when the active
  // policy does not estimate. (Kept scalar so Patient stays allocation-free:
  // network-state clones copy the whole roster.)
  double predicted_los = -1;
};

// One PHC: four single-server stations in series plus its own arrival
// process and RNG streams. Value-copyable so whole-network state clones
// are plain copies.
struct Facility {
  int index = 0;
  std::string name;
  double interarrival_mean = 9.0;
  double p_ncd = 0.5;
  double p_lab = 0.5;
  std::array<Subsystem, kNumSubsystems> subsystems;

  RngStream arrivals_rng;
  RngStream attrs_rng;
  std::array<RngStream, kNumSubsystems> service_rng;

  // Observed arrival instants of the current day, for rate estimation.
  std::vector<double> arrival_times;
  StatAccumulator los_stats;

  Subsystem& sub(SubsystemId s) { return subsystems[static_cast<int>(s)]; }
  const Subsystem& sub(SubsystemId s) const {
    return subsystems[static_cast<int>(s)];
  }
  RngStream& rng_for(SubsystemId s) {
    return service_rng[static_cast<int>(s)];
  }

  bool empty() const {
    for (const auto& s : subsystems)
      if (s.present() > 0) return false;
    return true;
  }

  void reset_day() {
    for (auto& s : subsystems) s.reset_day();
    arrival_times.clear();
    los_stats.reset();
  }
};

// Frozen per-subsystem state used by the predictor. Immutable after
// capture; carries copies, not references.
struct FacilitySnapshot {
  struct Entry {
    int queue_len = 0;
    std::optional<double> in_service_elapsed;  // absent if idle
    double mean_service = 0;
    ServiceDistribution dist = ServiceDistribution::uniform(0.0, 1.0);
  };

  int facility = 0;
  double t = 0;
  double lambda_hat = 0;  // patients per minute, observed post-diversion
  std::array<Entry, kNumSubsystems> subs;
};

// Estimated arrival rate over the trailing window; before `window`
// minutes have elapsed, arrivals-so-far over elapsed time.
double arrival_rate_estimate(const std::vector<double>& arrival_times, double t,
                             double window);

FacilitySnapshot snapshot(const Facility& f, double t, double window);

SubsystemId first_subsystem(const Patient& p);

// Fig-style pathway: (ncd) -> doc -> (lab) -> pharmacy -> exit.
std::optional<SubsystemId> route_after(SubsystemId s, const Patient& p);

}  // namespace phcsim
