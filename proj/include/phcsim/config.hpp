#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phcsim/des.hpp"
#include "phcsim/distributions.hpp"

namespace phcsim {

struct FacilityConfig {
  std::string name;
  double interarrival_mean = 9.0;
  double p_ncd = 0.5;  // share of patients seeing the NCD nurse first
  double p_lab = 0.5;  // share of doctor patients sent to the laboratory
  std::array<ServiceDistribution, kNumSubsystems> services{
      ServiceDistribution::uniform(2.0, 5.0),
      ServiceDistribution::truncated_normal(0.87, 0.21),
      ServiceDistribution::truncated_normal(3.451, 0.873),
      ServiceDistribution::truncated_normal(2.084, 0.723)};

  friend bool operator==(const FacilityConfig&, const FacilityConfig&) =
      default;
};

struct ScenarioConfig {
  std::vector<FacilityConfig> facilities;
  std::vector<std::vector<double>> travel;  // minutes, [assigned][visited]
  std::vector<std::string> policies{"none", "predicted", "oracle"};
  int replications = 40;
  int horizon_days = 365;
  int warmup_days = 180;
  std::uint64_t master_seed = 1;
  double rate_window = 60.0;  // trailing arrival-rate estimation window
  std::string out_dir = "out";

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) =
      default;
};

// Carries every violation found, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// "uniform a b" | "truncated_normal mu sigma [lower upper]" |
// "exponential rate"; throws std::invalid_argument on malformed text.
ServiceDistribution parse_distribution(const std::string& text);

// Structural violations of an already-parsed config; empty when valid.
std::vector<std::string> config_violations(const ScenarioConfig& cfg);

// Throw ConfigError (with the full violation list) unless cfg is valid.
void require_valid(const ScenarioConfig& cfg);

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& origin = "<string>");
ScenarioConfig parse_config(const std::string& path);

// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

// FNV-1a digest of the canonical text, for report provenance lines.
std::uint64_t config_digest(const ScenarioConfig& cfg);

struct Overrides {
  std::optional<std::string> policy;
  std::optional<int> reps;
  std::optional<int> horizon;
  std::optional<int> warmup;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

// Replaces exactly the named keys; callers re-validate afterwards.
void apply_overrides(ScenarioConfig& cfg, const Overrides& o);

}  // namespace phcsim
