#include "phcsim/diversion.hpp"

#include "phcsim/predictor.hpp"
#include "phcsim/sim.hpp"

namespace phcsim {

namespace {

// Argmin with strict improvement only: starting from the assigned
// facility means ties keep the assignment, and equal non-assigned
// candidates resolve to the lower index.
void choose_min(DiversionDecision& d, int assigned) {
  d.chosen = assigned;
  for (int j = 0; j < static_cast<int>(d.candidate_los.size()); ++j)
    if (d.candidate_los[j] < d.candidate_los[d.chosen]) d.chosen = j;
  d.diverted = (d.chosen != assigned);
}

}  // namespace

DiversionDecision NoDiversionPolicy::decide(const SimState& state, int patient,
                                            double now) const {
  return DiversionDecision{
      patient, now, {}, state.patients[patient].origin_facility, false};
}

DiversionDecision PredictedLosPolicy::decide(const SimState& state,
                                             int patient, double now) const {
  const Patient& p = state.patients[patient];
  DiversionDecision d{patient, now, {}, p.origin_facility, false};
  d.candidate_los.reserve(state.facilities.size());
  for (const Facility& f : state.facilities) {
    FacilitySnapshot snap = snapshot(f, now, state.params.rate_window);
    LosPrediction pred = predict_total_los(
        snap, state.params.travel[p.origin_facility][f.index], &state.diag);
    d.candidate_los.push_back(pred.total);
  }
  choose_min(d, p.origin_facility);
  return d;
}

DiversionDecision OracleLosPolicy::decide(const SimState& state, int patient,
                                          double now) const {
  const Patient& p = state.patients[patient];
  DiversionDecision d{patient, now, {}, p.origin_facility, false};
  d.candidate_los.reserve(state.facilities.size());
  for (int j = 0; j < static_cast<int>(state.facilities.size()); ++j)
    d.candidate_los.push_back(clone_lookahead_los(state, patient, j, now));
  choose_min(d, p.origin_facility);
  return d;
}

std::unique_ptr<DiversionPolicy> make_policy(const std::string& name) {
  if (name == "none") return std::make_unique<NoDiversionPolicy>();
  if (name == "predicted") return std::make_unique<PredictedLosPolicy>();
  if (name == "oracle") return std::make_unique<OracleLosPolicy>();
  return nullptr;
}

}  // namespace phcsim
