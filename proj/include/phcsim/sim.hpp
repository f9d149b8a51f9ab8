#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phcsim/des.hpp"
#include "phcsim/diversion.hpp"
#include "phcsim/facility.hpp"
#include "phcsim/predictor.hpp"

namespace phcsim {

struct SimParams {
  double opd_window = kOpdWindowMinutes;  // arrival window per day
  double rate_window = 60.0;              // lambda-hat estimation window
  std::vector<std::vector<double>> travel;  // minutes, [origin][destination]
  double lookahead_horizon = 1e4;         // oracle clone safety bound
};

struct Event {
  enum class Kind { Origin, Arrival, Completion };
  Kind kind = Kind::Origin;
  int facility = 0;
  int patient = -1;                    // Arrival only
  SubsystemId sub = SubsystemId::Ncd;  // Completion only
};

enum class TraceKind { Origin, Arrive, Start, Finish, Exit };

struct TraceRecord {
  double t = 0;
  int facility = -1;
  int sub = -1;  // -1 when not tied to a subsystem
  TraceKind kind = TraceKind::Origin;
  int patient = -1;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_policy(const std::string& policy) { (void)policy; }
  virtual void on_day(int replication, int day) { (void)replication, (void)day; }
  virtual void emit(const TraceRecord& rec) = 0;
};

class VectorTraceSink final : public TraceSink {
 public:
  std::vector<TraceRecord> records;
  void emit(const TraceRecord& rec) override { records.push_back(rec); }
};

// Whole-network state for one replication. Value-copyable: an oracle
// lookahead is a plain copy, including RNG streams, so the mainline
// streams are never advanced by lookaheads.
struct SimState {
  SimParams params;
  EventCalendar<Event> calendar;
  std::vector<Facility> facilities;
  std::vector<Patient> patients;  // day-local pool, id = index
  int day = 0;
  double last_event_time = 0;
  std::uint64_t origins = 0;
  std::uint64_t exits = 0;
  mutable PredictorDiagnostics diag;  // clamp counters, cumulative
};

struct DayStats {
  double day_end = 0;       // time the facility network drained
  std::uint64_t origins = 0;
  std::uint64_t exits = 0;
};

// Clears queues, day statistics and the patient pool, then schedules the
// first origin of each facility's daily arrival process.
void begin_day(SimState& state, int day);

// Dispatches the next pending event.
void step(SimState& state, const DiversionPolicy& policy,
          TraceSink* trace = nullptr);

// Runs one OPD session to completion: origins in [0, opd_window), then
// service until every facility drains.
DayStats run_opd_day(SimState& state, const DiversionPolicy& policy,
                     TraceSink* trace = nullptr);

// Realized LOS of `patient` at `candidate`, obtained on a value clone of
// the state with the patient's arrival injected at now + travel. Throws
// std::logic_error if the lookahead exceeds params.lookahead_horizon.
double clone_lookahead_los(const SimState& state, int patient, int candidate,
                           double now);

}  // namespace phcsim
