#pragma once

#include <memory>
#include <string>
#include <vector>

namespace phcsim {

struct SimState;

struct DiversionDecision {
  int patient = -1;
  double time = 0;
  // Estimated LOS per candidate facility; empty when the policy does
  // not estimate (no-diversion).
  std::vector<double> candidate_los;
  int chosen = 0;
  bool diverted = false;
};

// Chooses the facility a freshly generated patient will visit. Policies
// are pure readers of the simulation state; the oracle policy works on
// value clones and leaves the mainline untouched.
class DiversionPolicy {
 public:
  virtual ~DiversionPolicy() = default;
  virtual std::string name() const = 0;
  virtual DiversionDecision decide(const SimState& state, int patient,
                                   double now) const = 0;
};

// Everyone visits their assigned facility.
class NoDiversionPolicy final : public DiversionPolicy {
 public:
  std::string name() const override { return "none"; }
  DiversionDecision decide(const SimState& state, int patient,
                           double now) const override;
};

// Argmin of the queueing-theoretic LOS prediction over all facilities;
// ties keep the assigned facility.
class PredictedLosPolicy final : public DiversionPolicy {
 public:
  std::string name() const override { return "predicted"; }
  DiversionDecision decide(const SimState& state, int patient,
                           double now) const override;
};

// Argmin of the realized LOS obtained by cloning the full simulation
// state and running each candidate forward until the patient exits.
// Future patients generated inside a clone keep using the deployed
// prediction-based routing, mirroring how the network would actually
// evolve while this patient is deciding.
class OracleLosPolicy final : public DiversionPolicy {
 public:
  std::string name() const override { return "oracle"; }
  DiversionDecision decide(const SimState& state, int patient,
                           double now) const override;
};

// "none" | "predicted" | "oracle"; nullptr for anything else.
std::unique_ptr<DiversionPolicy> make_policy(const std::string& name);

}  // namespace phcsim
