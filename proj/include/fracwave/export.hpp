#pragma once

// Deterministic CSV / JSON / binary artifacts. Numbers are printed with
// %.17g and no wall-clock data is written, so re-exports are byte-identical.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwave/config.hpp"
#include "fracwave/diagnostics.hpp"
#include "fracwave/harness.hpp"
#include "fracwave/rothe.hpp"

namespace fracwave {

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string library_version();
std::string format_number(double x);

inline constexpr const char* kEnergyHeader = "t,kinetic,elastic,penalty,dissipation,work,residual";

std::string energy_csv(const EnergyReport& e);
// Columns: t, then u at every decimate-th Omega node (header u<k> by node rank).
std::string trajectory_csv(const Trajectory& traj, int decimate = 1);
// One row per axis value; cauchy_QT / cauchy_T hold the difference to the previous row.
std::string sweep_csv(const SweepReport& r);
std::string sweep_json(const SweepReport& r);

struct ArtifactMeta {
  std::string kind;  // run | sweep | check
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> files;
};

std::string metadata_json(const ArtifactMeta& m);

// Binary trajectory: magic, config hash, step count, node count, then u, v and
// beta_eps(u) on the Omega nodes for j = 0..n.
void write_trajectory_binary(const Trajectory& traj, const std::string& config_hash,
                             const std::string& path);
// Rebuilds a trajectory for spec from a binary file; throws ExportError when the
// file does not match spec or the expected hash.
Trajectory read_trajectory_binary(const ProblemSpec& spec, const std::string& expected_hash,
                                  const std::string& path);

// Creates dir (and parents) and writes content to dir/name.
void write_file(const std::string& dir, const std::string& name, const std::string& content);

// Writes the run artifacts selected by cfg.output.formats into dir and returns
// the file names in write order.
std::vector<std::string> export_run(const Trajectory& traj, const RunConfig& cfg,
                                    const std::string& dir);
std::vector<std::string> export_sweep(const SweepReport& r, const RunConfig& cfg,
                                      const std::string& dir);

}  // namespace fracwave
