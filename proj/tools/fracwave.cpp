#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "fracwave/acceptance.hpp"
#include "fracwave/config.hpp"
#include "fracwave/export.hpp"
#include "fracwave/harness.hpp"
#include "fracwave/rothe.hpp"

namespace fw = fracwave;

namespace {

struct Common {
  std::string config;
  std::string out;
  long long seed = -1;
  int threads = 1;
  std::string resolution;  // "N" or "N:steps"
};

fw::RunConfig load(const Common& c) {
  if (c.config.empty()) throw fw::ConfigError({"--config: a configuration file is required"});
  fw::RunConfig cfg = fw::load_config(c.config);
  if (c.seed >= 0) cfg.seed = std::uint64_t(c.seed);
  if (!c.resolution.empty()) {
    const auto colon = c.resolution.find(':');
    try {
      cfg.domain.N = std::stoi(c.resolution.substr(0, colon));
      if (colon != std::string::npos) cfg.physics.steps = std::stoi(c.resolution.substr(colon + 1));
    } catch (const std::exception&) {
      throw fw::ConfigError({"--resolution-override: expected N or N:steps"});
    }
    // Revalidate the overridden configuration.
    cfg = fw::parse_config(fw::serialize_config(cfg));
  }
  if (!c.out.empty()) cfg.output.directory = c.out;
  return cfg;
}

int cmd_run(const Common& c) {
  const fw::RunConfig cfg = load(c);
  const fw::Trajectory traj = fw::run(fw::build_problem(cfg));
  const auto files = fw::export_run(traj, cfg, cfg.output.directory);
  const auto energy = fw::energy_ledger(traj);
  std::cout << "steps " << traj.steps() << ", final energy residual "
            << fw::format_number(energy.final_residual()) << "\n";
  for (const auto& f : files) std::cout << "wrote " << cfg.output.directory << "/" << f << "\n";
  return 0;
}

int cmd_sweep(const Common& c) {
  const fw::RunConfig cfg = load(c);
  if (cfg.sweep.values.empty()) throw fw::ConfigError({"sweep.values: must be nonempty"});
  const fw::SweepReport r = fw::run_sweep(fw::build_sweep(cfg, c.threads));
  const auto files = fw::export_sweep(r, cfg, cfg.output.directory);
  std::cout << "sweep " << fw::to_string(r.axis) << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& n : r.notes) std::cout << "  note: " << n << "\n";
  for (const auto& f : files) std::cout << "wrote " << cfg.output.directory << "/" << f << "\n";
  return r.pass ? 0 : 1;
}

int cmd_check(const Common& c, const std::vector<int>& only) {
  fw::AcceptanceOptions opt;
  if (c.seed >= 0) opt.seed = std::uint64_t(c.seed);
  opt.threads = c.threads;
  opt.only = only;
  const auto results = fw::run_acceptance(opt, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass() ? 0 : 1;
  std::cout << results.size() - std::size_t(failed) << "/" << results.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_export(const Common& c, const std::string& from) {
  const std::filesystem::path src(from);
  if (c.out.empty()) throw fw::ConfigError({"--out: export needs a destination directory"});
  // The saved output directory is part of the hashed configuration, so it is kept.
  Common local = c;
  local.out.clear();
  if (local.config.empty()) local.config = (src / "config.json").string();
  const fw::RunConfig cfg = load(local);
  const std::string saved_hash = fw::config_hash(fw::load_config((src / "config.json").string()));
  const fw::Trajectory traj = fw::read_trajectory_binary(fw::build_problem(cfg), saved_hash,
                                                         (src / "trajectory.bin").string());
  const auto files = fw::export_run(traj, cfg, c.out);
  for (const auto& f : files) std::cout << "wrote " << c.out << "/" << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalised fractional wave solver with obstacle constraints"};
  app.set_version_flag("--version", fw::library_version());
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON configuration file");
    sub->add_option("--out", common.out, "Output directory");
    sub->add_option("--seed", common.seed, "Seed for test libraries and random checks")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--threads", common.threads, "Worker threads for sweeps")
        ->check(CLI::PositiveNumber);
    sub->add_option("--resolution-override", common.resolution,
                    "Override grid resolution as N or N:steps");
  };
  auto* run = app.add_subcommand("run", "Solve one configuration and export the trajectory");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "Run the sweep described by the configuration");
  add_common(sweep);
  auto* check = app.add_subcommand("check", "Run the acceptance suite");
  add_common(check);
  std::vector<int> only;
  check->add_option("--only", only, "Criterion ids to run")->check(CLI::Range(1, 12));
  auto* exp = app.add_subcommand("export", "Re-export a saved run (config.json + trajectory.bin)");
  add_common(exp);
  std::string from;
  exp->add_option("--from", from, "Directory of a run exported with the binary format")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common);
    if (*check) return cmd_check(common, only);
    if (*exp) return cmd_export(common, from);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
