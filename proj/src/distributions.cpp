#include "phcsim/distributions.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace phcsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t hash_label(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ rotl(b, 32);
  std::uint64_t m = splitmix64(x);
  return m ^ splitmix64(x);
}

RngStream::RngStream() : RngStream(0, "") {}

RngStream::RngStream(std::uint64_t seed, std::string label)
    : seed_(seed), label_(std::move(label)) {
  std::uint64_t sm = mix_seed(seed, hash_label(label_));
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) { return uniform01() < p; }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

ServiceDistribution ServiceDistribution::uniform(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("uniform: requires a < b");
  ServiceDistribution d;
  d.kind_ = DistKind::Uniform;
  d.p1_ = a;
  d.p2_ = b;
  d.lo_ = a;
  d.hi_ = b;
  d.finalize();
  return d;
}

ServiceDistribution ServiceDistribution::truncated_normal(double mu,
                                                          double sigma) {
  return truncated_normal(mu, sigma, 0.0, mu + 6.0 * sigma);
}

ServiceDistribution ServiceDistribution::truncated_normal(double mu,
                                                          double sigma,
                                                          double lower,
                                                          double upper) {
  if (!(sigma > 0))
    throw std::invalid_argument("truncated_normal: requires sigma > 0");
  if (!(lower < upper))
    throw std::invalid_argument("truncated_normal: requires lower < upper");
  if (!(lower >= 0))
    throw std::invalid_argument("truncated_normal: requires lower >= 0");
  ServiceDistribution d;
  d.kind_ = DistKind::TruncatedNormal;
  d.p1_ = mu;
  d.p2_ = sigma;
  d.lo_ = lower;
  d.hi_ = upper;
  d.finalize();
  return d;
}

ServiceDistribution ServiceDistribution::exponential(double rate) {
  if (!(rate > 0)) throw std::invalid_argument("exponential: requires rate > 0");
  ServiceDistribution d;
  d.kind_ = DistKind::Exponential;
  d.p1_ = rate;
  d.lo_ = 0.0;
  d.hi_ = std::numeric_limits<double>::infinity();
  d.finalize();
  return d;
}

void ServiceDistribution::finalize() {
  switch (kind_) {
    case DistKind::Uniform: {
      mean_ = 0.5 * (p1_ + p2_);
      double w = p2_ - p1_;
      variance_ = w * w / 12.0;
      break;
    }
    case DistKind::TruncatedNormal: {
      // Standard truncated-moment formulas on [lo, hi].
      double alpha = (lo_ - p1_) / p2_;
      double beta = (hi_ - p1_) / p2_;
      double z = normal_cdf(beta) - normal_cdf(alpha);
      double pa = normal_pdf(alpha), pb = normal_pdf(beta);
      mean_ = p1_ + p2_ * (pa - pb) / z;
      double r = (alpha * pa - beta * pb) / z;
      double s = (pa - pb) / z;
      variance_ = p2_ * p2_ * (1.0 + r - s * s);
      break;
    }
    case DistKind::Exponential:
      mean_ = 1.0 / p1_;
      variance_ = 1.0 / (p1_ * p1_);
      break;
  }
  q50_ = quantile(0.5);
  q75_ = quantile(0.75);
  b_ = (kind_ == DistKind::Uniform) ? hi_ : quantile(0.99);
}

double ServiceDistribution::cdf(double t) const {
  switch (kind_) {
    case DistKind::Uniform:
      if (t <= p1_) return 0.0;
      if (t >= p2_) return 1.0;
      return (t - p1_) / (p2_ - p1_);
    case DistKind::TruncatedNormal: {
      if (t <= lo_) return 0.0;
      if (t >= hi_) return 1.0;
      double alpha = (lo_ - p1_) / p2_;
      double beta = (hi_ - p1_) / p2_;
      double z = normal_cdf(beta) - normal_cdf(alpha);
      return (normal_cdf((t - p1_) / p2_) - normal_cdf(alpha)) / z;
    }
    case DistKind::Exponential:
      if (t <= 0) return 0.0;
      return -std::expm1(-p1_ * t);
  }
  return 0.0;
}

double ServiceDistribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("quantile: p must lie in (0,1)");
  switch (kind_) {
    case DistKind::Uniform:
      return p1_ + p * (p2_ - p1_);
    case DistKind::Exponential:
      return -std::log1p(-p) / p1_;
    case DistKind::TruncatedNormal: {
      // Bisection on the cdf; support is bounded.
      double lo = lo_, hi = hi_;
      while (hi - lo > 1e-11) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

double ServiceDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case DistKind::Uniform:
      return p1_ + rng.uniform01() * (p2_ - p1_);
    case DistKind::Exponential:
      return -std::log1p(-rng.uniform01()) / p1_;
    case DistKind::TruncatedNormal: {
      // Rejection from the parent normal; acceptance is high for the
      // parameterizations in scope.
      for (;;) {
        double u1 = 1.0 - rng.uniform01();  // (0, 1]
        double u2 = rng.uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
        double x = p1_ + p2_ * z;
        if (x >= lo_ && x <= hi_) return x;
      }
    }
  }
  return 0.0;
}

std::string ServiceDistribution::to_string() const {
  // Shortest digit strings that parse back to the same doubles, so the
  // text form both reads cleanly and round-trips exactly.
  auto num = [](double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
  };
  switch (kind_) {
    case DistKind::Uniform:
      return "uniform " + num(p1_) + " " + num(p2_);
    case DistKind::TruncatedNormal:
      return "truncated_normal " + num(p1_) + " " + num(p2_) + " " +
             num(lo_) + " " + num(hi_);
    case DistKind::Exponential:
      return "exponential " + num(p1_);
  }
  return "";
}

}  // namespace phcsim
