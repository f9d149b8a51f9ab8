#include "phcsim/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace phcsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string fmt_double(double v) {
  // Shortest representation that parses back to the same double.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

bool to_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool to_int(const std::string& s, int& out) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) return false;
    out = static_cast<int>(v);
    return static_cast<long long>(out) == v;
  } catch (...) {
    return false;
  }
}

bool to_u64(const std::string& s, std::uint64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoull(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string join_violations(const std::vector<std::string>& v) {
  std::string s = "configuration invalid (" + std::to_string(v.size()) +
                  (v.size() == 1 ? " violation):" : " violations):");
  for (const auto& m : v) s += "\n  - " + m;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)),
      violations_(std::move(violations)) {}

ServiceDistribution parse_distribution(const std::string& text) {
  auto toks = split_ws(text);
  if (toks.empty())
    throw std::invalid_argument("distribution: empty specification");
  std::vector<double> args;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    double v;
    if (!to_double(toks[i], v))
      throw std::invalid_argument("distribution: '" + toks[i] +
                                  "' is not a number");
    args.push_back(v);
  }
  const std::string& kind = toks[0];
  if (kind == "uniform") {
    if (args.size() != 2)
      throw std::invalid_argument("uniform: expected 'uniform a b'");
    return ServiceDistribution::uniform(args[0], args[1]);
  }
  if (kind == "truncated_normal") {
    if (args.size() == 2)
      return ServiceDistribution::truncated_normal(args[0], args[1]);
    if (args.size() == 4)
      return ServiceDistribution::truncated_normal(args[0], args[1], args[2],
                                                   args[3]);
    throw std::invalid_argument(
        "truncated_normal: expected 'truncated_normal mu sigma [lower upper]'");
  }
  if (kind == "exponential") {
    if (args.size() != 1)
      throw std::invalid_argument("exponential: expected 'exponential rate'");
    return ServiceDistribution::exponential(args[0]);
  }
  throw std::invalid_argument("distribution: unknown kind '" + kind + "'");
}

std::vector<std::string> config_violations(const ScenarioConfig& cfg) {
  std::vector<std::string> v;
  if (cfg.facilities.empty())
    v.push_back("scenario: at least one facility is required");
  std::set<std::string> seen_names;
  for (const auto& f : cfg.facilities) {
    std::string at = "facility " + f.name + ": ";
    if (f.name.empty()) v.push_back("facility: name must not be empty");
    if (!seen_names.insert(f.name).second)
      v.push_back(at + "duplicate facility name");
    if (!(f.interarrival_mean > 0))
      v.push_back(at + "interarrival_mean must be > 0");
    if (f.p_ncd < 0 || f.p_ncd > 1)
      v.push_back(at + "p_ncd must lie in [0, 1]");
    if (f.p_lab < 0 || f.p_lab > 1)
      v.push_back(at + "p_lab must lie in [0, 1]");
  }
  std::size_t n = cfg.facilities.size();
  if (cfg.travel.size() != n) {
    v.push_back("travel: matrix must have one row per facility (" +
                std::to_string(n) + "), has " +
                std::to_string(cfg.travel.size()));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = cfg.travel[i];
      if (row.size() != n) {
        v.push_back("travel: row " + std::to_string(i) + " must have " +
                    std::to_string(n) + " entries, has " +
                    std::to_string(row.size()));
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!(row[j] > 0))
          v.push_back("travel: entry [" + std::to_string(i) + "][" +
                      std::to_string(j) + "] must be > 0");
        if (j != i && row[j] < row[i])
          v.push_back("travel: assigned facility must be nearest, but [" +
                      std::to_string(i) + "][" + std::to_string(j) + "] < [" +
                      std::to_string(i) + "][" + std::to_string(i) + "]");
      }
    }
  }
  if (cfg.replications < 1)
    v.push_back("scenario: replications must be positive");
  if (cfg.horizon_days < 1)
    v.push_back("scenario: horizon_days must be positive");
  if (cfg.warmup_days < 1)
    v.push_back("scenario: warmup_days must be positive");
  if (cfg.horizon_days >= 1 && cfg.warmup_days >= cfg.horizon_days)
    v.push_back("scenario: warmup_days (" + std::to_string(cfg.warmup_days) +
                ") must be < horizon_days (" +
                std::to_string(cfg.horizon_days) + ")");
  if (!(cfg.rate_window > 0))
    v.push_back("scenario: rate_window must be > 0");
  if (cfg.policies.empty())
    v.push_back("scenario: at least one policy is required");
  std::set<std::string> seen_policies;
  for (const auto& p : cfg.policies) {
    if (p != "none" && p != "predicted" && p != "oracle")
      v.push_back("scenario: unknown policy '" + p +
                  "' (expected none|predicted|oracle)");
    else if (!seen_policies.insert(p).second)
      v.push_back("scenario: duplicate policy '" + p + "'");
  }
  if (cfg.out_dir.empty()) v.push_back("output: dir must not be empty");
  return v;
}

void require_valid(const ScenarioConfig& cfg) {
  auto v = config_violations(cfg);
  if (!v.empty()) throw ConfigError(std::move(v));
}

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& origin) {
  ScenarioConfig cfg;
  std::vector<std::string> bad;
  enum class Sect { None, Scenario, Facility, Travel, Output };
  Sect sect = Sect::None;
  FacilityConfig* fac = nullptr;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto err = [&](const std::string& msg) {
    bad.push_back(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      fac = nullptr;
      sect = Sect::None;
      if (line.back() != ']') {
        err("malformed section header '" + line + "'");
        continue;
      }
      auto toks = split_ws(line.substr(1, line.size() - 2));
      if (toks.size() == 1 && toks[0] == "scenario") {
        sect = Sect::Scenario;
      } else if (toks.size() == 2 && toks[0] == "facility") {
        sect = Sect::Facility;
        cfg.facilities.push_back(FacilityConfig{});
        fac = &cfg.facilities.back();
        fac->name = toks[1];
      } else if (toks.size() == 1 && toks[0] == "travel") {
        sect = Sect::Travel;
      } else if (toks.size() == 1 && toks[0] == "output") {
        sect = Sect::Output;
      } else {
        err("unknown section '" + line + "'");
      }
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) {
      err("expected 'key = value', got '" + line + "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    switch (sect) {
      case Sect::Scenario: {
        if (key == "policies" || key == "policy") {
          cfg.policies = split_ws(value);
        } else if (key == "replications") {
          if (!to_int(value, cfg.replications))
            err("replications: '" + value + "' is not an integer");
        } else if (key == "horizon_days") {
          if (!to_int(value, cfg.horizon_days))
            err("horizon_days: '" + value + "' is not an integer");
        } else if (key == "warmup_days") {
          if (!to_int(value, cfg.warmup_days))
            err("warmup_days: '" + value + "' is not an integer");
        } else if (key == "seed") {
          if (!to_u64(value, cfg.master_seed))
            err("seed: '" + value + "' is not an unsigned integer");
        } else if (key == "rate_window") {
          if (!to_double(value, cfg.rate_window))
            err("rate_window: '" + value + "' is not a number");
        } else {
          err("unknown scenario key '" + key + "'");
        }
        break;
      }
      case Sect::Facility: {
        bool matched = false;
        for (int s = 0; s < kNumSubsystems; ++s) {
          if (key != std::string("service_") + kSubsystemNames[s]) continue;
          matched = true;
          try {
            fac->services[s] = parse_distribution(value);
          } catch (const std::invalid_argument& e) {
            err(key + ": " + e.what());
          }
        }
        if (matched) break;
        double d;
        if (key == "interarrival_mean") {
          if (!to_double(value, fac->interarrival_mean))
            err("interarrival_mean: '" + value + "' is not a number");
        } else if (key == "p_ncd") {
          if (!to_double(value, d))
            err("p_ncd: '" + value + "' is not a number");
          else
            fac->p_ncd = d;
        } else if (key == "p_lab") {
          if (!to_double(value, d))
            err("p_lab: '" + value + "' is not a number");
          else
            fac->p_lab = d;
        } else {
          err("unknown facility key '" + key + "'");
        }
        break;
      }
      case Sect::Travel: {
        if (key != "row") {
          err("unknown travel key '" + key + "' (expected 'row')");
          break;
        }
        std::vector<double> row;
        bool ok = true;
        for (const auto& tok : split_ws(value)) {
          double d;
          if (!to_double(tok, d)) {
            err("travel row: '" + tok + "' is not a number");
            ok = false;
            break;
          }
          row.push_back(d);
        }
        if (ok) cfg.travel.push_back(std::move(row));
        break;
      }
      case Sect::Output: {
        if (key == "dir")
          cfg.out_dir = value;
        else
          err("unknown output key '" + key + "'");
        break;
      }
      case Sect::None:
        err("key '" + key + "' outside any section");
        break;
    }
  }

  if (cfg.travel.empty() && !cfg.facilities.empty()) {
    // No [travel] section: 10 minutes to the assigned facility, 20 to any
    // other.
    std::size_t n = cfg.facilities.size();
    cfg.travel.assign(n, std::vector<double>(n, 20.0));
    for (std::size_t i = 0; i < n; ++i) cfg.travel[i][i] = 10.0;
  }

  for (auto& msg : config_violations(cfg)) bad.push_back(origin + ": " + msg);
  if (!bad.empty()) throw ConfigError(std::move(bad));
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError({path + ": cannot read scenario config"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "policies =";
  for (const auto& p : cfg.policies) out << " " << p;
  out << "\n";
  out << "replications = " << cfg.replications << "\n";
  out << "horizon_days = " << cfg.horizon_days << "\n";
  out << "warmup_days = " << cfg.warmup_days << "\n";
  out << "seed = " << cfg.master_seed << "\n";
  out << "rate_window = " << fmt_double(cfg.rate_window) << "\n";
  for (const auto& f : cfg.facilities) {
    out << "\n[facility " << f.name << "]\n";
    out << "interarrival_mean = " << fmt_double(f.interarrival_mean) << "\n";
    out << "p_ncd = " << fmt_double(f.p_ncd) << "\n";
    out << "p_lab = " << fmt_double(f.p_lab) << "\n";
    for (int s = 0; s < kNumSubsystems; ++s)
      out << "service_" << kSubsystemNames[s] << " = "
          << f.services[s].to_string() << "\n";
  }
  out << "\n[travel]\n";
  for (const auto& row : cfg.travel) {
    out << "row =";
    for (double d : row) out << " " << fmt_double(d);
    out << "\n";
  }
  out << "\n[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  return out.str();
}

std::uint64_t config_digest(const ScenarioConfig& cfg) {
  return hash_label(serialize_config(cfg));
}

void apply_overrides(ScenarioConfig& cfg, const Overrides& o) {
  if (o.policy) cfg.policies = {*o.policy};
  if (o.reps) cfg.replications = *o.reps;
  if (o.horizon) cfg.horizon_days = *o.horizon;
  if (o.warmup) cfg.warmup_days = *o.warmup;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
}

}  // namespace phcsim
