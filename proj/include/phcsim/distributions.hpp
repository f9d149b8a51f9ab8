#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace phcsim {

// Small value-type PRNG (xoshiro256++). A stream is identified by
// (seed, label): equal pairs give identical sequences, distinct labels
// under the same seed give independent sequences. Copyable, so cloned
// simulation states carry their own streams.
class RngStream {
 public:
  RngStream();
  RngStream(std::uint64_t seed, std::string label);

  std::uint64_t next_u64();
  double uniform01();  // in [0, 1)
  bool bernoulli(double p);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::string label_;
};

// Deterministic 64-bit label hash (FNV-1a), used for stream derivation.
std::uint64_t hash_label(const std::string& label);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

enum class DistKind { Uniform, TruncatedNormal, Exponential };

// Service / interarrival time distribution, all parameters in minutes
// (rates in 1/minute). Parameters are validated at construction;
// sampling itself never fails.
class ServiceDistribution {
 public:
  static ServiceDistribution uniform(double a, double b);
  // Truncation defaults to [0, mu + 6*sigma].
  static ServiceDistribution truncated_normal(double mu, double sigma);
  static ServiceDistribution truncated_normal(double mu, double sigma,
                                              double lower, double upper);
  static ServiceDistribution exponential(double rate);

  DistKind kind() const { return kind_; }
  double param1() const { return p1_; }  // a | mu | rate
  double param2() const { return p2_; }  // b | sigma | unused

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double cdf(double t) const;
  double quantile(double p) const;  // p in (0,1), else std::domain_error
  double sample(RngStream& rng) const;

  double support_lower() const { return lo_; }
  double support_upper() const { return hi_; }  // +inf for exponential

  // Upper limit b used by the piecewise residual predictor: the exact
  // support bound for the uniform kind, the 0.99 quantile otherwise.
  double upper_b() const { return b_; }
  double median() const { return q50_; }
  double q75() const { return q75_; }

  std::string to_string() const;

  friend bool operator==(const ServiceDistribution&,
                         const ServiceDistribution&) = default;

 private:
  ServiceDistribution() = default;
  void finalize();  // caches moments and quantiles

  DistKind kind_ = DistKind::Uniform;
  double p1_ = 0, p2_ = 0;
  double lo_ = 0, hi_ = 0;
  double mean_ = 0, variance_ = 0;
  double q50_ = 0, q75_ = 0, b_ = 0;
};

// Standard normal pdf / cdf helpers.
double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace phcsim
