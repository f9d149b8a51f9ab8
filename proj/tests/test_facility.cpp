#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "phcsim/config.hpp"
#include "phcsim/diversion.hpp"
#include "phcsim/facility.hpp"
#include "phcsim/metrics.hpp"
#include "phcsim/sim.hpp"

using namespace phcsim;

namespace {

ScenarioConfig single_facility(double interarrival, double p_ncd,
                               double p_lab) {
  ScenarioConfig cfg;
  cfg.facilities.push_back(FacilityConfig{});
  cfg.facilities[0].name = "probe";
  cfg.facilities[0].interarrival_mean = interarrival;
  cfg.facilities[0].p_ncd = p_ncd;
  cfg.facilities[0].p_lab = p_lab;
  cfg.travel = {{10.0}};
  cfg.policies = {"none"};
  cfg.master_seed = 505;
  return cfg;
}

}  // namespace

TEST_CASE("routing follows the four-station pathway flags") {
  Patient p;
  p.needs_ncd = true;
  p.needs_lab = true;
  CHECK(first_subsystem(p) == SubsystemId::Ncd);
  CHECK(route_after(SubsystemId::Ncd, p) == SubsystemId::Doc);
  CHECK(route_after(SubsystemId::Doc, p) == SubsystemId::Lab);
  CHECK(route_after(SubsystemId::Lab, p) == SubsystemId::Pharmacy);
  CHECK_FALSE(route_after(SubsystemId::Pharmacy, p).has_value());

  p.needs_ncd = false;
  p.needs_lab = false;
  CHECK(first_subsystem(p) == SubsystemId::Doc);
  CHECK(route_after(SubsystemId::Doc, p) == SubsystemId::Pharmacy);
  CHECK_FALSE(route_after(SubsystemId::Pharmacy, p).has_value());
}

TEST_CASE("arrival rate estimate counts the trailing window only") {
  std::vector<double> arrivals = {1.0, 2.0, 3.0, 41.0, 95.0, 99.0};
  // Ramp: before the window has elapsed, arrivals-so-far over elapsed.
  CHECK(arrival_rate_estimate({1.0, 2.0, 3.0}, 4.0, 60.0) ==
        doctest::Approx(3.0 / 4.0));
  CHECK(arrival_rate_estimate(arrivals, 0.0, 60.0) == 0.0);
  // Post-ramp: only arrivals inside (t - window, t] count.
  CHECK(arrival_rate_estimate(arrivals, 100.0, 60.0) ==
        doctest::Approx(3.0 / 60.0));  // 41, 95, 99
  CHECK(arrival_rate_estimate({}, 100.0, 60.0) == 0.0);
}

TEST_CASE("long-run arrival rates match the configured interarrival means") {
  for (double mean : {9.0, 2.0}) {
    ScenarioConfig cfg = single_facility(mean, 0.5, 0.5);
    SimState state = make_sim_state(cfg, 0);
    NoDiversionPolicy none;
    std::uint64_t origins = 0;
    const int days = 200;
    for (int day = 1; day <= days; ++day) {
      begin_day(state, day);
      origins += run_opd_day(state, none).origins;
    }
    double rate = static_cast<double>(origins) / (days * kOpdWindowMinutes);
    CHECK(rate == doctest::Approx(1.0 / mean).epsilon(0.02));
  }
}

TEST_CASE("about half of doctor patients continue to the laboratory") {
  ScenarioConfig cfg = single_facility(9.0, 0.5, 0.5);
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  std::uint64_t lab = 0, total = 0;
  for (int day = 1; day <= 100; ++day) {
    begin_day(state, day);
    run_opd_day(state, none);
    for (const Patient& p : state.patients) {
      ++total;
      if (p.visits[static_cast<int>(SubsystemId::Lab)].visited()) ++lab;
    }
  }
  CHECK(static_cast<double>(lab) / total == doctest::Approx(0.5).epsilon(0.08));
}

TEST_CASE("snapshot freezes queue lengths, elapsed service, and rate") {
  Facility f;
  f.index = 0;
  for (int s = 0; s < kNumSubsystems; ++s) {
    f.subsystems[s].id = static_cast<SubsystemId>(s);
    f.subsystems[s].service = FacilityConfig{}.services[s];
  }

  SUBCASE("empty facility") {
    FacilitySnapshot snap = snapshot(f, 30.0, 60.0);
    for (const auto& e : snap.subs) {
      CHECK(e.queue_len == 0);
      CHECK_FALSE(e.in_service_elapsed.has_value());
    }
    CHECK(snap.lambda_hat == 0.0);
    CHECK(snap.t == 30.0);
  }

  SUBCASE("one patient in doctor service for half a minute") {
    RngStream rng(4, "svc");
    f.sub(SubsystemId::Doc).enter(1, 10.0, rng);
    FacilitySnapshot snap = snapshot(f, 10.5, 60.0);
    const auto& doc = snap.subs[static_cast<int>(SubsystemId::Doc)];
    CHECK(doc.queue_len == 0);
    REQUIRE(doc.in_service_elapsed.has_value());
    CHECK(*doc.in_service_elapsed == doctest::Approx(0.5));
  }

  SUBCASE("three queued at pharmacy behind an in-service patient") {
    RngStream rng(4, "svc");
    auto& phar = f.sub(SubsystemId::Pharmacy);
    phar.enter(1, 9.0, rng);
    phar.enter(2, 9.2, rng);
    phar.enter(3, 9.5, rng);
    phar.enter(4, 9.9, rng);
    FacilitySnapshot snap = snapshot(f, 10.0, 60.0);
    const auto& e = snap.subs[static_cast<int>(SubsystemId::Pharmacy)];
    CHECK(e.queue_len == 3);
    REQUIRE(e.in_service_elapsed.has_value());
    CHECK(*e.in_service_elapsed == doctest::Approx(1.0));
    CHECK(e.mean_service ==
          doctest::Approx(FacilityConfig{}.services[3].mean()));
  }

  SUBCASE("lambda_hat reflects the facility's observed arrivals") {
    f.arrival_times = {61.0, 80.0, 100.0};
    FacilitySnapshot snap = snapshot(f, 120.0, 60.0);
    CHECK(snap.lambda_hat == doctest::Approx(3.0 / 60.0));
  }
}

TEST_CASE("realized LOS decomposes exactly into waits plus services") {
  ScenarioConfig cfg = single_facility(4.0, 0.7, 0.5);
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  int checked = 0;
  for (int day = 1; day <= 20; ++day) {
    begin_day(state, day);
    run_opd_day(state, none);
    for (const Patient& p : state.patients) {
      REQUIRE(p.exit_time >= 0);
      double parts = 0;
      for (const auto& v : p.visits)
        if (v.visited()) parts += v.wait() + v.service();
      CHECK(p.realized_los == doctest::Approx(parts).epsilon(1e-12));
      CHECK(p.realized_los >= 0.0);
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("every exited patient walked one of the four pathways") {
  ScenarioConfig cfg = single_facility(3.0, 0.5, 0.5);
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  for (int day = 1; day <= 20; ++day) {
    begin_day(state, day);
    run_opd_day(state, none);
    for (const Patient& p : state.patients) {
      CHECK(p.visits[static_cast<int>(SubsystemId::Ncd)].visited() ==
            p.needs_ncd);
      CHECK(p.visits[static_cast<int>(SubsystemId::Doc)].visited());
      CHECK(p.visits[static_cast<int>(SubsystemId::Lab)].visited() ==
            p.needs_lab);
      CHECK(p.visits[static_cast<int>(SubsystemId::Pharmacy)].visited());
    }
  }
}

TEST_CASE("a day with no arrivals leaves all stations idle") {
  ScenarioConfig cfg = single_facility(1e9, 0.5, 0.5);
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  begin_day(state, 1);
  DayStats stats = run_opd_day(state, none);
  CHECK(stats.origins == 0);
  CHECK(stats.exits == 0);
  for (const auto& s : state.facilities[0].subsystems) {
    CHECK(utilization(s.busy_time) == 0.0);
  }
}

TEST_CASE("an overloaded session pushes utilization past one") {
  ScenarioConfig cfg = single_facility(2.0, 1.0, 0.5);
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  begin_day(state, 1);
  run_opd_day(state, none);
  double rho_ncd =
      utilization(state.facilities[0].sub(SubsystemId::Ncd).busy_time);
  CHECK(rho_ncd > 1.0);
}

TEST_CASE("every day drains: equal counts and an empty facility") {
  ScenarioConfig cfg = single_facility(9.0, 0.5, 0.5);
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  for (int day = 1; day <= 50; ++day) {
    begin_day(state, day);
    DayStats stats = run_opd_day(state, none);
    CHECK(stats.origins == stats.exits);
    CHECK(state.facilities[0].empty());
    // Lightly loaded sessions drain well before ten windows.
    CHECK(stats.day_end < 10.0 * kOpdWindowMinutes);
  }
}

TEST_CASE("taking snapshots does not perturb the simulation") {
  auto run_day = [](bool with_snapshots) {
    ScenarioConfig cfg = single_facility(4.0, 0.5, 0.5);
    SimState state = make_sim_state(cfg, 0);
    NoDiversionPolicy none;
    VectorTraceSink trace;
    begin_day(state, 1);
    while (!state.calendar.empty()) {
      if (with_snapshots) {
        FacilitySnapshot snap =
            snapshot(state.facilities[0], state.calendar.now(), 60.0);
        (void)snap;
      }
      step(state, none, &trace);
    }
    return trace.records;
  };
  CHECK(run_day(false) == run_day(true));
}
