// Command-line front end: `run` simulates a scenario config and writes
// reports, `validate` executes the analytic self-checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "phcsim/config.hpp"
#include "phcsim/metrics.hpp"
#include "phcsim/sim.hpp"
#include "phcsim/validation.hpp"

namespace {

// Plain-text event log: one record per line, day/policy boundaries as
// comment lines.
class FileTraceSink final : public phcsim::TraceSink {
 public:
  explicit FileTraceSink(const std::string& path)
      : out_(path, std::ios::binary) {}
  bool ok() const { return static_cast<bool>(out_); }

  void on_policy(const std::string& policy) override {
    out_ << "# policy " << policy << "\n";
  }
  void on_day(int replication, int day) override {
    out_ << "# replication " << replication << " day " << day << "\n";
  }
  void emit(const phcsim::TraceRecord& rec) override {
    static const char* kKindNames[] = {"origin", "arrive", "start", "finish",
                                       "exit"};
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6f %d %d %s %d\n", rec.t, rec.facility,
                  rec.sub, kKindNames[static_cast<int>(rec.kind)],
                  rec.patient);
    out_ << buf;
  }

 private:
  std::ofstream out_;
};

bool write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  return !out.fail();
}

int cmd_validate() {
  bool all = true;
  for (const auto& check : phcsim::run_all_checks()) {
    std::printf("[%s] %s\n", check.passed ? "PASS" : "FAIL",
                check.name.c_str());
    std::istringstream lines(check.detail);
    std::string line;
    while (std::getline(lines, line))
      std::printf("    %s\n", line.c_str());
    all = all && check.passed;
  }
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"outpatient facility-network queueing simulator"};
  app.require_subcommand(1);

  std::string config_path, policy, trace_path, out_dir;
  int reps = 0, horizon = 0, warmup = 0, jobs = 0;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand(
      "run", "simulate a scenario config and write reports");
  run->add_option("config", config_path, "scenario config file")->required();
  CLI::Option* policy_opt = run->add_option(
      "--policy", policy, "run only this policy (none|predicted|oracle)");
  CLI::Option* reps_opt =
      run->add_option("--reps", reps, "replication count override");
  CLI::Option* horizon_opt =
      run->add_option("--horizon", horizon, "horizon days override");
  CLI::Option* warmup_opt =
      run->add_option("--warmup", warmup, "warm-up days override");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "master seed override");
  run->add_option("--jobs", jobs,
                  "worker threads across replications (default: all "
                  "processors)");
  run->add_option("--trace", trace_path,
                  "write the replication-0 event trace to this path");
  CLI::Option* out_opt =
      run->add_option("--out", out_dir, "output directory override");

  CLI::App* validate =
      app.add_subcommand("validate", "run the analytic self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.got_subcommand(validate)) return cmd_validate();

  phcsim::ScenarioConfig cfg;
  try {
    cfg = phcsim::parse_config(config_path);
    phcsim::Overrides o;
    if (*policy_opt) o.policy = policy;
    if (*reps_opt) o.reps = reps;
    if (*horizon_opt) o.horizon = horizon;
    if (*warmup_opt) o.warmup = warmup;
    if (*seed_opt) o.seed = seed;
    if (*out_opt) o.out_dir = out_dir;
    phcsim::apply_overrides(cfg, o);
    phcsim::require_valid(cfg);
  } catch (const phcsim::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }

  std::unique_ptr<FileTraceSink> trace;
  if (!trace_path.empty()) {
    trace = std::make_unique<FileTraceSink>(trace_path);
    if (!trace->ok()) {
      std::fprintf(stderr, "cannot open trace path %s\n", trace_path.c_str());
      return 4;
    }
  }

  phcsim::ScenarioReport report = phcsim::run_scenario(cfg, jobs, trace.get());

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create output directory %s: %s\n",
                 cfg.out_dir.c_str(), ec.message().c_str());
    return 4;
  }
  fs::path csv_path = fs::path(cfg.out_dir) / "report.csv";
  fs::path summary_path = fs::path(cfg.out_dir) / "summary.txt";
  std::string summary = phcsim::report_summary(report);
  if (!write_file(csv_path, phcsim::report_csv(report)) ||
      !write_file(summary_path, summary)) {
    std::fprintf(stderr, "cannot write reports under %s\n",
                 cfg.out_dir.c_str());
    return 4;
  }

  std::fputs(summary.c_str(), stdout);
  std::printf("\nwrote %s and %s\n", csv_path.c_str(), summary_path.c_str());
  return 0;
}
