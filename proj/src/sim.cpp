#include "phcsim/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace phcsim {

namespace {

// Poisson arrival process: exponential gaps at the facility's mean.
double draw_interarrival(Facility& f) {
  double u = f.arrivals_rng.uniform01();
  return -f.interarrival_mean * std::log1p(-u);
}

void emit(TraceSink* trace, double t, int facility, int sub, TraceKind kind,
          int patient) {
  if (trace) trace->emit(TraceRecord{t, facility, sub, kind, patient});
}

// Service-start bookkeeping shared by arrival and completion handling.
void record_start(SimState& state, TraceSink* trace, int facility,
                  SubsystemId s, const Subsystem::Started& started, double t) {
  state.patients[started.patient].visits[static_cast<int>(s)].start = t;
  emit(trace, t, facility, static_cast<int>(s), TraceKind::Start,
       started.patient);
  state.calendar.schedule(started.completion_time,
                          Event{Event::Kind::Completion, facility, -1, s});
}

void enter_subsystem(SimState& state, TraceSink* trace, int facility,
                     SubsystemId s, int patient, double t) {
  Facility& f = state.facilities[facility];
  state.patients[patient].visits[static_cast<int>(s)].enqueue = t;
  auto started = f.sub(s).enter(patient, t, f.rng_for(s));
  if (started) record_start(state, trace, facility, s, *started, t);
}

}  // namespace

void begin_day(SimState& state, int day) {
  state.day = day;
  state.calendar.reset();
  state.patients.clear();
  state.origins = 0;
  state.exits = 0;
  state.last_event_time = 0;
  for (Facility& f : state.facilities) {
    f.reset_day();
    double first = draw_interarrival(f);
    if (first < state.params.opd_window)
      state.calendar.schedule(
          first, Event{Event::Kind::Origin, f.index, -1, SubsystemId::Ncd});
  }
}

void step(SimState& state, const DiversionPolicy& policy, TraceSink* trace) {
  if (state.calendar.empty()) throw std::logic_error("step: no pending events");
  auto [t, ev] = state.calendar.pop();
  state.last_event_time = t;
  switch (ev.kind) {
    case Event::Kind::Origin: {
      Facility& f = state.facilities[ev.facility];
      int id = static_cast<int>(state.patients.size());
      Patient p;
      p.id = id;
      p.origin_facility = ev.facility;
      p.decision_time = t;
      p.needs_ncd = f.attrs_rng.bernoulli(f.p_ncd);
      p.needs_lab = f.attrs_rng.bernoulli(f.p_lab);
      state.patients.push_back(p);
      ++state.origins;
      // The next origin is scheduled before the decision so that policy
      // lookaheads see the facility's complete future arrival process.
      double next = t + draw_interarrival(f);
      if (next < state.params.opd_window)
        state.calendar.schedule(
            next, Event{Event::Kind::Origin, f.index, -1, SubsystemId::Ncd});
      emit(trace, t, ev.facility, -1, TraceKind::Origin, id);
      DiversionDecision d = policy.decide(state, id, t);
      Patient& self = state.patients[id];
      self.chosen_facility = d.chosen;
      self.diverted = (d.chosen != self.origin_facility);
      if (!d.candidate_los.empty())
        self.predicted_los = d.candidate_los[d.chosen];
      double arrive = t + state.params.travel[self.origin_facility][d.chosen];
      state.calendar.schedule(
          arrive, Event{Event::Kind::Arrival, d.chosen, id, SubsystemId::Ncd});
      break;
    }
    case Event::Kind::Arrival: {
      Facility& f = state.facilities[ev.facility];
      Patient& p = state.patients[ev.patient];
      p.facility_arrival = t;
      f.arrival_times.push_back(t);
      emit(trace, t, ev.facility, -1, TraceKind::Arrive, ev.patient);
      enter_subsystem(state, trace, ev.facility, first_subsystem(p),
                      ev.patient, t);
      break;
    }
    case Event::Kind::Completion: {
      Facility& f = state.facilities[ev.facility];
      auto res = f.sub(ev.sub).complete(t, f.rng_for(ev.sub));
      Patient& done = state.patients[res.completed];
      done.visits[static_cast<int>(ev.sub)].end = t;
      emit(trace, t, ev.facility, static_cast<int>(ev.sub), TraceKind::Finish,
           res.completed);
      if (res.next) record_start(state, trace, ev.facility, ev.sub, *res.next, t);
      if (auto nxt = route_after(ev.sub, done)) {
        enter_subsystem(state, trace, ev.facility, *nxt, res.completed, t);
      } else {
        done.exit_time = t;
        done.realized_los = t - done.facility_arrival;
        f.los_stats.add(done.realized_los);
        ++state.exits;
        emit(trace, t, ev.facility, -1, TraceKind::Exit, res.completed);
      }
      break;
    }
  }
}

DayStats run_opd_day(SimState& state, const DiversionPolicy& policy,
                     TraceSink* trace) {
  while (!state.calendar.empty()) step(state, policy, trace);
  if (state.origins != state.exits)
    throw std::logic_error("run_opd_day: " + std::to_string(state.origins) +
                           " origins but " + std::to_string(state.exits) +
                           " exits");
  return DayStats{state.last_event_time, state.origins, state.exits};
}

double clone_lookahead_los(const SimState& state, int patient, int candidate,
                           double now) {
  SimState clone = state;
  {
    Patient& p = clone.patients.at(patient);
    p.chosen_facility = candidate;
    p.diverted = (candidate != p.origin_facility);
    double arrive = now + clone.params.travel[p.origin_facility][candidate];
    clone.calendar.schedule(
        arrive, Event{Event::Kind::Arrival, candidate, patient,
                      SubsystemId::Ncd});
  }
  // Patients generated inside the lookahead keep using the deployed
  // prediction-based routing; recursing into further lookaheads would
  // not terminate.
  PredictedLosPolicy future;
  double deadline = now + clone.params.lookahead_horizon;
  while (!clone.calendar.empty()) {
    if (clone.calendar.next_time() > deadline)
      throw std::logic_error("clone_lookahead_los: lookahead exceeded horizon");
    step(clone, future, nullptr);
    if (clone.patients[patient].exit_time >= 0)
      return clone.patients[patient].realized_los;
  }
  throw std::logic_error("clone_lookahead_los: patient never exited");
}

}  // namespace phcsim
