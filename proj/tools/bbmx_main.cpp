// bbmx: simulate branching Brownian motion genealogies, extract extremal
// point samples and run the statistical verification suites.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbmx/decoration.hpp"
#include "bbmx/experiment.hpp"
#include "bbmx/parallel.hpp"
#include "bbmx/verify.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t replicas = 0;
  bool replicas_set = false;
  double horizon = 0.0;
  bool horizon_set = false;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "root seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--replicas", flags.replicas, "replica count")
      ->each([&flags](const std::string&) { flags.replicas_set = true; });
  cmd->add_option("--t", flags.horizon, "time horizon")
      ->each([&flags](const std::string&) { flags.horizon_set = true; });
  cmd->add_option("--workers", flags.workers,
                  "worker threads (default: BBMX_WORKERS or hardware)");
}

bbmx::RunConfig resolve_config(const CommonFlags& flags) {
  bbmx::RunConfig config;
  if (!flags.config_path.empty()) {
    config = bbmx::load_run_config(flags.config_path);
  }
  if (flags.seed_set) config.seed = flags.seed;
  if (flags.replicas_set) config.replicas = flags.replicas;
  if (flags.horizon_set) config.horizon = flags.horizon;
  if (flags.workers > 0) config.workers = flags.workers;
  config.bbm_config().validate();
  return config;
}

int run_command(const CommonFlags& flags, std::optional<double> thin_q) {
  bbmx::RunConfig config = resolve_config(flags);
  if (thin_q) config.thin_q = thin_q;
  const fs::path out =
      flags.out_dir.empty() ? fs::path("run_out") : fs::path(flags.out_dir);
  const bbmx::RunOutcome outcome = bbmx::run_experiment(config, out);
  std::cout << "run: " << outcome.directory.string() << " status "
            << outcome.status << ", " << outcome.replicas_written
            << " replicas" << std::endl;
  return outcome.status == "ok" ? 0 : 1;
}

int verify_command(const CommonFlags& flags, const std::string& suite_name,
                   bool smoke) {
  const bbmx::Suite suite = bbmx::parse_suite(suite_name);
  bbmx::VerifyOptions options;
  options.seed = flags.seed_set ? flags.seed : 42;
  options.workers = flags.workers;
  options.smoke = smoke;
  const std::vector<bbmx::DiagnosticReport> reports =
      bbmx::run_suite(suite, options);
  for (const auto& report : reports) {
    std::cout << bbmx::format_report_line(report) << std::endl;
  }
  const fs::path out =
      flags.out_dir.empty() ? fs::path("verify_out") : fs::path(flags.out_dir);
  fs::create_directories(out);
  const fs::path report_path =
      out / ("report_" + bbmx::suite_name(suite) + ".json");
  std::ofstream file(report_path);
  file << bbmx::reports_json(suite, reports, options).dump(2) << "\n";
  const bool pass = bbmx::all_pass(reports);
  std::cout << (pass ? "PASS" : "FAIL") << " (" << reports.size()
            << " checks, report " << report_path.string() << ")" << std::endl;
  return pass ? 0 : 1;
}

int decorate_command(const CommonFlags& flags, std::optional<double> r,
                     std::uint64_t max_attempts) {
  const double t = flags.horizon_set ? flags.horizon : 6.0;
  const std::uint64_t replicas = flags.replicas_set ? flags.replicas : 100;
  const std::uint64_t seed = flags.seed_set ? flags.seed : 42;
  const fs::path out = flags.out_dir.empty() ? fs::path("decorate_out")
                                             : fs::path(flags.out_dir);
  fs::create_directories(out);
  const auto dist = bbmx::OffspringDistribution::binary();

  std::vector<std::string> records(replicas);
  bbmx::parallel_for(replicas, flags.workers, [&](std::size_t i) {
    const bbmx::ConditionedSample conditioned = bbmx::sample_conditioned(
        t, dist, bbmx::StreamKey{seed, i}, max_attempts);
    const bbmx::DecorationSample sample =
        bbmx::decoration_atoms(conditioned.snapshot, r);
    nlohmann::ordered_json rec;
    rec["schema"] = bbmx::kSchemaVersion;
    rec["replica"] = i;
    rec["t"] = t;
    rec["attempts"] = conditioned.attempts;
    if (r) {
      rec["r"] = *r;
    } else {
      rec["r"] = nullptr;
    }
    rec["atoms"] = sample.atoms;
    records[i] = rec.dump();
  });
  std::string body;
  for (const auto& record : records) {
    body += record;
    body += '\n';
  }
  std::ofstream file(out / "decorations.jsonl", std::ios::binary);
  file << body;
  std::cout << "decorate: " << replicas << " accepted samples -> "
            << (out / "decorations.jsonl").string() << std::endl;
  return 0;
}

int report_command(const std::string& run_dir) {
  const nlohmann::ordered_json summary =
      bbmx::summarize_run(fs::path(run_dir));
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "branching Brownian motion extremes: simulation and verification"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  double thin_q = 0.0;
  CLI::App* run = app.add_subcommand("run", "simulate replicas into a run directory");
  add_common(run, run_flags);

  CommonFlags thin_flags;
  CLI::App* thin = app.add_subcommand(
      "thin", "simulate replicas and emit cluster decompositions");
  add_common(thin, thin_flags);
  thin->add_option("--q", thin_q, "overlap threshold in (0,1)")->required();

  CommonFlags verify_flags;
  std::string suite = "all";
  bool smoke = false;
  CLI::App* verify =
      app.add_subcommand("verify", "run the acceptance suites");
  add_common(verify, verify_flags);
  verify->add_option("--suite", suite,
                     "identities|spine|thinning|extremes|martingales|"
                     "decoration|all");
  verify->add_flag("--smoke", smoke, "reduced replica counts (machinery check)");

  CommonFlags decorate_flags;
  double decorate_r = -1.0;
  std::uint64_t max_attempts = 200000;
  CLI::App* decorate = app.add_subcommand(
      "decorate", "sample conditioned decorations (max above sqrt(2) t)");
  add_common(decorate, decorate_flags);
  decorate->add_option("--r", decorate_r, "truncation age (optional)");
  decorate->add_option("--max-attempts", max_attempts,
                       "rejection budget per accepted sample");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "summarize a run directory");
  report->add_option("--run", report_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_flags, std::nullopt);
    if (thin->parsed()) return run_command(thin_flags, thin_q);
    if (verify->parsed()) return verify_command(verify_flags, suite, smoke);
    if (decorate->parsed()) {
      return decorate_command(
          decorate_flags,
          decorate_r >= 0.0 ? std::optional<double>(decorate_r) : std::nullopt,
          max_attempts);
    }
    if (report->parsed()) return report_command(report_dir);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << std::endl;
    return 2;
  }
  return 0;
}
