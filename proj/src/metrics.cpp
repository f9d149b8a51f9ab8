#include "phcsim/metrics.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "phcsim/diversion.hpp"

namespace phcsim {

double utilization(double busy_minutes, double session_minutes) {
  return busy_minutes / session_minutes;
}

double disparity(double v1, double v2) {
  double m = std::max(v1, v2);
  if (m <= 0) return 0.0;
  return std::abs(v1 - v2) / m * 100.0;
}

MapeResult mape(const std::vector<std::pair<double, double>>& pairs) {
  MapeResult r;
  double sum = 0;
  for (const auto& [actual, predicted] : pairs) {
    if (actual <= 0) {
      ++r.excluded;
      continue;
    }
    sum += std::abs((actual - predicted) / actual);
    ++r.used;
  }
  r.percent = r.used ? 100.0 * sum / static_cast<double>(r.used) : 0.0;
  return r;
}

Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  a.n = xs.size();
  if (xs.empty()) return a;
  double s = 0;
  for (double x : xs) s += x;
  a.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) {
      double d = x - a.mean;
      ss += d * d;
    }
    a.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return a;
}

SimState make_sim_state(const ScenarioConfig& cfg, int replication) {
  SimState state;
  state.params.opd_window = kOpdWindowMinutes;
  state.params.rate_window = cfg.rate_window;
  state.params.travel = cfg.travel;
  std::uint64_t rep_seed =
      mix_seed(cfg.master_seed, static_cast<std::uint64_t>(replication) + 1);
  state.facilities.reserve(cfg.facilities.size());
  for (std::size_t i = 0; i < cfg.facilities.size(); ++i) {
    const FacilityConfig& fc = cfg.facilities[i];
    Facility f;
    f.index = static_cast<int>(i);
    f.name = fc.name;
    f.interarrival_mean = fc.interarrival_mean;
    f.p_ncd = fc.p_ncd;
    f.p_lab = fc.p_lab;
    for (int s = 0; s < kNumSubsystems; ++s) {
      f.subsystems[s].id = static_cast<SubsystemId>(s);
      f.subsystems[s].service = fc.services[s];
      f.service_rng[s] = RngStream(
          rep_seed, fc.name + "." + kSubsystemNames[s] + ".service");
    }
    f.arrivals_rng = RngStream(rep_seed, fc.name + ".arrivals");
    f.attrs_rng = RngStream(rep_seed, fc.name + ".attrs");
    state.facilities.push_back(std::move(f));
  }
  return state;
}

ReplicationStats run_replication(const ScenarioConfig& cfg,
                                 const DiversionPolicy& policy,
                                 int replication, TraceSink* trace) {
  SimState state = make_sim_state(cfg, replication);
  std::size_t n = cfg.facilities.size();

  struct Acc {
    std::array<double, kNumSubsystems> busy{};
    std::array<double, kNumSubsystems> wait_sum{};
    std::array<std::uint64_t, kNumSubsystems> wait_n{};
    double los_sum = 0;
    std::uint64_t los_n = 0;
    double ape_sum = 0;
    std::uint64_t ape_n = 0;
    std::uint64_t ape_excluded = 0;
  };
  std::vector<Acc> acc(n);
  std::uint64_t patients = 0, diverted = 0;
  int days_retained = 0;

  for (int day = 1; day <= cfg.horizon_days; ++day) {
    if (trace) trace->on_day(replication, day);
    begin_day(state, day);
    run_opd_day(state, policy, trace);
    if (day <= cfg.warmup_days) continue;
    ++days_retained;
    for (std::size_t i = 0; i < n; ++i) {
      const Facility& f = state.facilities[i];
      for (int s = 0; s < kNumSubsystems; ++s) {
        acc[i].busy[s] += f.subsystems[s].busy_time;
        acc[i].wait_sum[s] += f.subsystems[s].wait_stats.sum;
        acc[i].wait_n[s] += f.subsystems[s].wait_stats.count;
      }
      acc[i].los_sum += f.los_stats.sum;
      acc[i].los_n += f.los_stats.count;
    }
    for (const Patient& p : state.patients) {
      ++patients;
      if (p.diverted) ++diverted;
      if (p.predicted_los >= 0) {
        Acc& a = acc[p.chosen_facility];
        if (p.realized_los > 0) {
          a.ape_sum += std::abs((p.realized_los - p.predicted_los) /
                                p.realized_los);
          ++a.ape_n;
        } else {
          ++a.ape_excluded;
        }
      }
    }
  }

  ReplicationStats out;
  out.replication = replication;
  out.facilities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    FacilityOutcomes& fo = out.facilities[i];
    for (int s = 0; s < kNumSubsystems; ++s) {
      fo.rho[s] = utilization(acc[i].busy[s]) / days_retained;
      fo.wait[s] = acc[i].wait_n[s]
                       ? acc[i].wait_sum[s] / static_cast<double>(acc[i].wait_n[s])
                       : 0.0;
    }
    fo.los = acc[i].los_n ? acc[i].los_sum / static_cast<double>(acc[i].los_n)
                          : 0.0;
    if (acc[i].ape_n)
      fo.mape = 100.0 * acc[i].ape_sum / static_cast<double>(acc[i].ape_n);
    fo.mape_excluded = acc[i].ape_excluded;
  }
  out.patients = patients;
  out.diverted = diverted;
  out.beta = patients ? 100.0 * static_cast<double>(diverted) /
                            static_cast<double>(patients)
                      : 0.0;
  out.predictor_clamps = state.diag.elapsed_beyond_b;
  return out;
}

namespace {

struct FacilityField {
  const char* suffix;
  double (*get)(const FacilityOutcomes&);
};

// Row order follows the outcome tables: utilizations (doctor, NCD nurse,
// pharmacy, lab), queue waits (same stations; the doctor's queue is the
// OPD queue), then LOS.
constexpr FacilityField kFacilityFields[] = {
    {"rho_doc",
     [](const FacilityOutcomes& f) {
       return f.rho[static_cast<int>(SubsystemId::Doc)];
     }},
    {"rho_ncd",
     [](const FacilityOutcomes& f) {
       return f.rho[static_cast<int>(SubsystemId::Ncd)];
     }},
    {"rho_phar",
     [](const FacilityOutcomes& f) {
       return f.rho[static_cast<int>(SubsystemId::Pharmacy)];
     }},
    {"rho_lab",
     [](const FacilityOutcomes& f) {
       return f.rho[static_cast<int>(SubsystemId::Lab)];
     }},
    {"w_opd",
     [](const FacilityOutcomes& f) {
       return f.wait[static_cast<int>(SubsystemId::Doc)];
     }},
    {"w_phar",
     [](const FacilityOutcomes& f) {
       return f.wait[static_cast<int>(SubsystemId::Pharmacy)];
     }},
    {"w_lab",
     [](const FacilityOutcomes& f) {
       return f.wait[static_cast<int>(SubsystemId::Lab)];
     }},
    {"w_ncd",
     [](const FacilityOutcomes& f) {
       return f.wait[static_cast<int>(SubsystemId::Ncd)];
     }},
    {"los", [](const FacilityOutcomes& f) { return f.los; }},
};

std::vector<std::optional<Aggregate>> collect_outcomes(
    const ScenarioConfig& cfg, const std::vector<ReplicationStats>& reps) {
  std::vector<std::optional<Aggregate>> out;
  auto push = [&](const std::vector<double>& xs) {
    out.push_back(aggregate(xs));
  };
  for (std::size_t i = 0; i < cfg.facilities.size(); ++i) {
    for (const auto& fld : kFacilityFields) {
      std::vector<double> xs;
      xs.reserve(reps.size());
      for (const auto& r : reps) xs.push_back(fld.get(r.facilities[i]));
      push(xs);
    }
  }
  if (cfg.facilities.size() == 2) {
    for (const auto& fld : kFacilityFields) {
      std::vector<double> xs;
      xs.reserve(reps.size());
      for (const auto& r : reps)
        xs.push_back(
            disparity(fld.get(r.facilities[0]), fld.get(r.facilities[1])));
      push(xs);
    }
  }
  {
    std::vector<double> xs;
    xs.reserve(reps.size());
    for (const auto& r : reps) xs.push_back(r.beta);
    push(xs);
  }
  for (std::size_t i = 0; i < cfg.facilities.size(); ++i) {
    std::vector<double> xs;
    for (const auto& r : reps)
      if (r.facilities[i].mape) xs.push_back(*r.facilities[i].mape);
    if (xs.empty())
      out.push_back(std::nullopt);
    else
      push(xs);
  }
  return out;
}

}  // namespace

std::vector<std::string> canonical_outcomes(const ScenarioConfig& cfg) {
  std::vector<std::string> names;
  for (const auto& f : cfg.facilities)
    for (const auto& fld : kFacilityFields)
      names.push_back(f.name + "." + fld.suffix);
  if (cfg.facilities.size() == 2)
    for (const auto& fld : kFacilityFields)
      names.push_back(std::string("delta.") + fld.suffix);
  names.push_back("beta");
  for (const auto& f : cfg.facilities) names.push_back(f.name + ".mape");
  return names;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, int jobs,
                            TraceSink* trace) {
  require_valid(cfg);
  ScenarioReport report;
  report.config = cfg;
  report.digest = config_digest(cfg);
  report.outcome_names = canonical_outcomes(cfg);
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;

  for (const auto& pname : cfg.policies) {
    auto policy = make_policy(pname);
    if (!policy)
      throw ConfigError({"scenario: unknown policy '" + pname + "'"});
    PolicyReport pr;
    pr.policy = pname;
    pr.replications.resize(cfg.replications);
    int start = 0;
    if (trace) {
      // Replication 0 runs on this thread so trace writes stay ordered.
      trace->on_policy(pname);
      pr.replications[0] = run_replication(cfg, *policy, 0, trace);
      start = 1;
    }
    int workers = std::min(jobs, cfg.replications - start);
    if (workers > 1) {
      std::atomic<int> next{start};
      std::exception_ptr failure;
      std::mutex failure_mu;
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          try {
            for (;;) {
              int r = next.fetch_add(1);
              if (r >= cfg.replications) return;
              pr.replications[r] = run_replication(cfg, *policy, r, nullptr);
            }
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        });
      for (auto& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);
    } else {
      for (int r = start; r < cfg.replications; ++r)
        pr.replications[r] = run_replication(cfg, *policy, r, nullptr);
    }
    pr.outcomes = collect_outcomes(cfg, pr.replications);
    report.policies.push_back(std::move(pr));
  }
  return report;
}

std::string report_csv(const ScenarioReport& report) {
  std::ostringstream out;
  out << "outcome";
  for (const auto& p : report.policies)
    out << "," << p.policy << "_mean," << p.policy << "_sd";
  out << "\n";
  char buf[80];
  for (std::size_t row = 0; row < report.outcome_names.size(); ++row) {
    out << report.outcome_names[row];
    for (const auto& p : report.policies) {
      if (p.outcomes[row]) {
        std::snprintf(buf, sizeof buf, ",%.6f,%.6f", p.outcomes[row]->mean,
                      p.outcomes[row]->sd);
        out << buf;
      } else {
        out << ",,";
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string report_summary(const ScenarioReport& report) {
  const ScenarioConfig& cfg = report.config;
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "config digest : %016llx\n",
                static_cast<unsigned long long>(report.digest));
  out << buf;
  out << "master seed   : " << cfg.master_seed << "\n";
  out << "replications  : " << cfg.replications << "\n";
  out << "horizon       : " << cfg.horizon_days << " days ("
      << cfg.warmup_days << " warm-up days excluded)\n";
  out << "facilities    :";
  for (const auto& f : cfg.facilities)
    out << " " << f.name << " (interarrival " << f.interarrival_mean
        << " min)";
  out << "\n\n";

  std::snprintf(buf, sizeof buf, "%-24s", "outcome");
  out << buf;
  for (const auto& p : report.policies) {
    std::snprintf(buf, sizeof buf, " %20s", p.policy.c_str());
    out << buf;
  }
  out << "\n";
  for (std::size_t row = 0; row < report.outcome_names.size(); ++row) {
    std::snprintf(buf, sizeof buf, "%-24s", report.outcome_names[row].c_str());
    out << buf;
    for (const auto& p : report.policies) {
      char cell[64];
      if (p.outcomes[row])
        std::snprintf(cell, sizeof cell, "%.3f (%.3f)", p.outcomes[row]->mean,
                      p.outcomes[row]->sd);
      else
        std::snprintf(cell, sizeof cell, "-");
      std::snprintf(buf, sizeof buf, " %20s", cell);
      out << buf;
    }
    out << "\n";
  }
  out << "\nrho_* = per-subsystem utilization; w_* = mean queue wait (min);\n"
         "los = mean length of stay (min); delta.* = cross-facility\n"
         "percentage difference; beta = % of patients diverted; mape =\n"
         "predictor mean absolute percentage error (%).\n";
  return out.str();
}

}  // namespace phcsim
