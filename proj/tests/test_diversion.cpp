#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "phcsim/config.hpp"
#include "phcsim/diversion.hpp"
#include "phcsim/metrics.hpp"
#include "phcsim/sim.hpp"

using namespace phcsim;

namespace {

ScenarioConfig two_facility_config() {
  ScenarioConfig cfg;
  for (const char* name : {"phc1", "phc2"}) {
    cfg.facilities.push_back(FacilityConfig{});
    cfg.facilities.back().name = name;
  }
  cfg.facilities[0].interarrival_mean = 9.0;
  cfg.facilities[1].interarrival_mean = 2.0;
  cfg.travel = {{5.0, 5.0}, {5.0, 5.0}};  // symmetric on purpose
  cfg.policies = {"none"};
  cfg.master_seed = 99;
  return cfg;
}

// Adds a synthetic ready-to-decide patient and returns its id.
int add_patient(SimState& state, int origin) {
  Patient p;
  p.id = static_cast<int>(state.patients.size());
  p.origin_facility = origin;
  p.chosen_facility = origin;
  p.needs_ncd = true;
  p.needs_lab = true;
  state.patients.push_back(p);
  return p.id;
}

// Parks `n` waiting patients plus one in service at every station of a
// facility, to make it look congested to the policies.
void preload(SimState& state, int facility, int n) {
  Facility& f = state.facilities[facility];
  for (auto& s : f.subsystems) {
    int filler = -1000;
    s.enter(filler, 0.0, f.rng_for(s.id));
    for (int i = 0; i < n; ++i) s.queue.push_back({filler, 0.0});
  }
}

// Runs the oracle lookahead for every candidate, then sends the patient
// to the assigned facility anyway. Used to prove lookaheads leave the
// mainline untouched.
class LookaheadProbePolicy final : public DiversionPolicy {
 public:
  std::string name() const override { return "probe"; }
  DiversionDecision decide(const SimState& state, int patient,
                           double now) const override {
    for (int j = 0; j < static_cast<int>(state.facilities.size()); ++j)
      (void)clone_lookahead_los(state, patient, j, now);
    return DiversionDecision{
        patient, now, {}, state.patients[patient].origin_facility, false};
  }
};

}  // namespace

TEST_CASE("no-diversion always keeps the assignment") {
  ScenarioConfig cfg = two_facility_config();
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;
  for (int origin : {0, 1}) {
    int id = add_patient(state, origin);
    DiversionDecision d = none.decide(state, id, 42.0);
    CHECK(d.chosen == origin);
    CHECK_FALSE(d.diverted);
    CHECK(d.candidate_los.empty());
    CHECK(d.time == 42.0);
  }
}

TEST_CASE("prediction-based routing picks the cheaper facility") {
  ScenarioConfig cfg = two_facility_config();
  SimState state = make_sim_state(cfg, 0);
  preload(state, 1, 8);  // phc2 congested at every station
  PredictedLosPolicy policy;

  SUBCASE("assigned to the busy facility: diverts away") {
    int id = add_patient(state, 1);
    DiversionDecision d = policy.decide(state, id, 30.0);
    REQUIRE(d.candidate_los.size() == 2);
    CHECK(d.candidate_los[0] < d.candidate_los[1]);
    CHECK(d.chosen == 0);
    CHECK(d.diverted);
  }

  SUBCASE("assigned to the quiet facility: stays") {
    int id = add_patient(state, 0);
    DiversionDecision d = policy.decide(state, id, 30.0);
    CHECK(d.chosen == 0);
    CHECK_FALSE(d.diverted);
  }

  SUBCASE("chosen always attains the minimum") {
    for (int origin : {0, 1}) {
      int id = add_patient(state, origin);
      DiversionDecision d = policy.decide(state, id, 50.0);
      for (double los : d.candidate_los)
        CHECK(d.candidate_los[d.chosen] <= los);
    }
  }
}

TEST_CASE("symmetric empty facilities tie back to the assignment") {
  ScenarioConfig cfg = two_facility_config();
  cfg.facilities[1].interarrival_mean = 9.0;  // fully symmetric network
  SimState state = make_sim_state(cfg, 0);
  PredictedLosPolicy policy;
  for (int origin : {0, 1}) {
    int id = add_patient(state, origin);
    DiversionDecision d = policy.decide(state, id, 10.0);
    CHECK(d.candidate_los[0] == d.candidate_los[1]);
    CHECK(d.chosen == origin);
    CHECK_FALSE(d.diverted);
  }
}

TEST_CASE("prediction-based decisions do not mutate the network") {
  ScenarioConfig cfg = two_facility_config();
  cfg.policies = {"predicted"};
  auto run_day = [&](bool with_extra_decides) {
    SimState state = make_sim_state(cfg, 0);
    PredictedLosPolicy policy;
    VectorTraceSink trace;
    begin_day(state, 1);
    while (!state.calendar.empty()) {
      if (with_extra_decides && !state.patients.empty())
        (void)policy.decide(state, 0, state.calendar.now());
      step(state, policy, &trace);
    }
    return trace.records;
  };
  CHECK(run_day(false) == run_day(true));
}

TEST_CASE("oracle lookaheads leave the mainline bit-identical") {
  ScenarioConfig cfg = two_facility_config();
  auto run_day = [&](const DiversionPolicy& policy) {
    SimState state = make_sim_state(cfg, 0);
    VectorTraceSink trace;
    begin_day(state, 1);
    DayStats stats = run_opd_day(state, policy, &trace);
    (void)stats;
    return std::pair{trace.records, state};
  };
  NoDiversionPolicy none;
  LookaheadProbePolicy probe;
  auto [trace_plain, state_plain] = run_day(none);
  auto [trace_probe, state_probe] = run_day(probe);

  // Identical event traces: every arrival, start, finish at equal times.
  CHECK(trace_plain == trace_probe);
  // Identical downstream randomness: every stream is in the same state.
  for (std::size_t f = 0; f < state_plain.facilities.size(); ++f) {
    CHECK(state_plain.facilities[f].arrivals_rng ==
          state_probe.facilities[f].arrivals_rng);
    CHECK(state_plain.facilities[f].attrs_rng ==
          state_probe.facilities[f].attrs_rng);
    for (int s = 0; s < kNumSubsystems; ++s)
      CHECK(state_plain.facilities[f].service_rng[s] ==
            state_probe.facilities[f].service_rng[s]);
  }
}

TEST_CASE("oracle lookahead LOS is exactly what later plays out") {
  // One facility: routing cannot diverge between the lookahead clone and
  // the mainline, so the clone's answer must be bit-exact.
  ScenarioConfig cfg;
  cfg.facilities.push_back(FacilityConfig{});
  cfg.facilities[0].name = "solo";
  cfg.facilities[0].interarrival_mean = 6.0;
  cfg.travel = {{3.0}};
  cfg.policies = {"oracle"};
  cfg.master_seed = 7;

  SimState state = make_sim_state(cfg, 0);
  OracleLosPolicy oracle;
  int checked = 0;
  for (int day = 1; day <= 5; ++day) {
    begin_day(state, day);
    run_opd_day(state, oracle);
    for (const Patient& p : state.patients) {
      REQUIRE(p.predicted_los >= 0);
      CHECK(p.realized_los == p.predicted_los);  // exact, not approximate
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("diverted flag is consistent with the chosen facility") {
  ScenarioConfig cfg = two_facility_config();
  cfg.policies = {"predicted"};
  SimState state = make_sim_state(cfg, 0);
  PredictedLosPolicy policy;
  begin_day(state, 1);
  run_opd_day(state, policy);
  for (const Patient& p : state.patients)
    CHECK(p.diverted == (p.chosen_facility != p.origin_facility));
}

TEST_CASE("policy factory knows exactly the three policies") {
  REQUIRE(make_policy("none"));
  REQUIRE(make_policy("predicted"));
  REQUIRE(make_policy("oracle"));
  CHECK(make_policy("none")->name() == "none");
  CHECK(make_policy("predicted")->name() == "predicted");
  CHECK(make_policy("oracle")->name() == "oracle");
  CHECK(make_policy("greedy") == nullptr);
  CHECK(make_policy("") == nullptr);
}
