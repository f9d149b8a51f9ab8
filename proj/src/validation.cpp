#include "phcsim/validation.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

#include "phcsim/des.hpp"
#include "phcsim/diversion.hpp"
#include "phcsim/metrics.hpp"
#include "phcsim/predictor.hpp"
#include "phcsim/sim.hpp"

namespace phcsim {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// The bundled service-time set, in station order.
std::array<ServiceDistribution, kNumSubsystems> default_services() {
  return FacilityConfig{}.services;
}

}  // namespace

CheckResult pollaczek_khinchine_check(std::uint64_t seed,
                                      std::uint64_t min_served) {
  const double lambda = 0.2;
  ServiceDistribution service =
      ServiceDistribution::truncated_normal(3.451, 0.873);
  double es = service.mean();
  double var = service.variance();
  double rho = lambda * es;
  double analytic = lambda * (var + es * es) / (2.0 * (1.0 - rho));

  RngStream arrivals(seed, "pk.arrivals");
  RngStream services(seed, "pk.service");
  Subsystem station;
  station.id = SubsystemId::Doc;
  station.service = service;

  EventCalendar<int> cal;  // 0 = arrival, 1 = completion
  const std::uint64_t warm_starts = 10000;
  std::uint64_t starts = 0, measured = 0;
  double wait_sum = 0;
  auto on_start = [&](const Subsystem::Started& s) {
    if (++starts > warm_starts) {
      wait_sum += s.wait;
      ++measured;
    }
    cal.schedule(s.completion_time, 1);
  };

  int ticket = 0;
  cal.schedule(-std::log1p(-arrivals.uniform01()) / lambda, 0);
  while (measured < min_served) {
    auto [t, kind] = cal.pop();
    if (kind == 0) {
      if (auto s = station.enter(ticket++, t, services)) on_start(*s);
      cal.schedule(t + -std::log1p(-arrivals.uniform01()) / lambda, 0);
    } else {
      auto res = station.complete(t, services);
      if (res.next) on_start(*res.next);
    }
  }
  double simulated = wait_sum / static_cast<double>(measured);
  double rel = std::abs(simulated - analytic) / analytic;
  CheckResult r;
  r.name = "mg1-mean-wait";
  r.passed = rel < 0.03;
  r.detail = fmt(
      "lambda=%.3f E[s]=%.6f Var[s]=%.6f rho=%.6f analytic Wq=%.6f "
      "simulated Wq=%.6f rel.err=%.4f%% over %llu waits",
      lambda, es, var, rho, analytic, simulated, 100.0 * rel,
      static_cast<unsigned long long>(measured));
  return r;
}

CheckResult littles_law_check(std::uint64_t seed, int days) {
  ScenarioConfig cfg;
  cfg.facilities = {FacilityConfig{.name = "probe", .interarrival_mean = 9.0}};
  cfg.travel = {{10.0}};
  cfg.policies = {"none"};
  cfg.master_seed = seed;
  SimState state = make_sim_state(cfg, 0);
  NoDiversionPolicy none;

  std::array<double, kNumSubsystems> q_integral{};
  std::array<double, kNumSubsystems> wait_total{};
  for (int d = 1; d <= days; ++d) {
    begin_day(state, d);
    run_opd_day(state, none);
    for (int s = 0; s < kNumSubsystems; ++s) {
      // Queues are drained, so the time-weighted integral is complete.
      q_integral[s] += state.facilities[0].subsystems[s].queue_len.tw_integral;
      wait_total[s] += state.facilities[0].subsystems[s].wait_stats.sum;
    }
  }

  CheckResult r;
  r.name = "littles-law";
  r.passed = true;
  std::ostringstream detail;
  for (int s = 0; s < kNumSubsystems; ++s) {
    double a = q_integral[s], b = wait_total[s];
    double rel = std::abs(a - b) / std::max(std::max(a, b), 1e-12);
    bool ok = rel < 0.02;
    r.passed = r.passed && ok;
    detail << fmt("%s: integrated queue length %.3f vs summed waits %.3f "
                  "(rel.err %.4f%%)%s\n",
                  kSubsystemNames[s], a, b, 100.0 * rel, ok ? "" : " FAIL");
  }
  r.detail = detail.str();
  return r;
}

CheckResult quantile_roundtrip_check() {
  std::vector<ServiceDistribution> dists;
  for (const auto& d : default_services()) dists.push_back(d);
  dists.push_back(ServiceDistribution::exponential(1.0 / 9.0));

  CheckResult r;
  r.name = "quantile-roundtrip";
  r.passed = true;
  std::ostringstream detail;
  for (const auto& d : dists) {
    double worst = 0;
    for (int i = 0; i <= 196; ++i) {
      double p = 0.01 + 0.005 * i;
      worst = std::max(worst, std::abs(d.cdf(d.quantile(p)) - p));
    }
    bool ok = worst < 1e-9;
    r.passed = r.passed && ok;
    detail << fmt("%s: max |cdf(quantile(p)) - p| = %.3e%s\n",
                  d.to_string().c_str(), worst, ok ? "" : " FAIL");
  }
  r.detail = detail.str();
  return r;
}

std::vector<ResidualGapRow> residual_gap_table() {
  std::vector<ResidualGapRow> rows;
  for (const auto& d : default_services()) {
    ResidualGapRow row;
    row.dist = d.to_string();
    row.dist_mean = d.mean();
    double hi = d.quantile(0.95);
    double gap_sum = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      double x = hi * i / (n - 1);
      gap_sum += std::abs(remaining_time_approx(d, x) -
                          remaining_time_exact(d, x));
    }
    row.mean_abs_gap = gap_sum / n;
    row.ok = row.mean_abs_gap < row.dist_mean;
    rows.push_back(row);
  }
  return rows;
}

CheckResult residual_gap_check() {
  CheckResult r;
  r.name = "residual-approximation";
  r.passed = true;
  std::ostringstream detail;
  for (const auto& row : residual_gap_table()) {
    r.passed = r.passed && row.ok;
    detail << fmt("%s: mean |piecewise - exact| = %.4f (bound %.4f)%s\n",
                  row.dist.c_str(), row.mean_abs_gap, row.dist_mean,
                  row.ok ? "" : " FAIL");
  }
  r.detail = detail.str();
  return r;
}

std::vector<CheckResult> run_all_checks() {
  return {pollaczek_khinchine_check(), littles_law_check(),
          quantile_roundtrip_check(), residual_gap_check()};
}

}  // namespace phcsim
