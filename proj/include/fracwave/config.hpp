#pragma once

// JSON run configuration: parse with full validation, serialize losslessly,
// and convert to solver and sweep inputs.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwave/harness.hpp"
#include "fracwave/profiles.hpp"
#include "fracwave/rothe.hpp"

namespace fracwave {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct DomainConfig {
  int d = 1;
  double L = 1.0;
  int kappa = 8;
  int N = 512;
  bool torus = false;
  bool operator==(const DomainConfig&) const = default;
};

struct PhysicsConfig {
  double s = 0.5;
  double nu = 1e-2;
  double epsilon = 1e-2;
  double T = 1.0;
  int steps = 100;
  bool allow_inviscid = false;
  bool operator==(const PhysicsConfig&) const = default;
};

// identity: scale * I. diagonal: d tables. matrix: d*d tables in row-major
// entry order. Each table holds one value (constant) or one per grid node.
struct MatrixConfig {
  std::string type = "identity";
  double scale = 1.0;
  std::vector<std::vector<double>> values;
  bool operator==(const MatrixConfig&) const = default;
};

struct CoefficientConfig {
  MatrixConfig A;
  MatrixConfig B;
  bool operator==(const CoefficientConfig&) const = default;
};

struct GraphConfig {
  // free | lower | upper | two_sided | staircase
  std::string type = "free";
  double a = 0.0;
  double b = 0.0;
  std::vector<Breakpoint> breakpoints;
  double slope_below = 0.0;
  double slope_above = 0.0;
  bool operator==(const GraphConfig&) const = default;
};

struct DataConfig {
  ProfileSpec w0;
  ProfileSpec w1;
  ProfileSpec g;
  bool operator==(const DataConfig&) const = default;
};

struct SolverConfig {
  double newton_rtol = 1e-10;
  double newton_atol = 1e-12;
  int newton_max_iters = 50;
  int armijo_max_halvings = 20;
  double armijo_c = 1e-4;
  int krylov_restart = 50;
  int krylov_max_iters = 200;
  double krylov_rtol = 1e-12;
  bool operator==(const SolverConfig&) const = default;
};

struct SweepConfig {
  std::string axis = "epsilon";
  std::vector<double> values;
  int test_count = 50;
  double tol_c1 = -1.0;
  double tol_c2 = 0.0;
  bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};  // csv | json | binary
  int decimate = 1;  // keep every k-th node in trajectory CSVs
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  DomainConfig domain;
  PhysicsConfig physics;
  CoefficientConfig coefficients;
  GraphConfig graph;
  DataConfig data;
  SolverConfig solver;
  SweepConfig sweep;
  OutputConfig output;
  std::uint64_t seed = 1;
  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError listing every violation with its key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical JSON with every field present; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& c);

GridSpec build_grid(const DomainConfig& d);
MonotoneGraph build_graph(const GraphConfig& g);
ProblemSpec build_problem(const RunConfig& c);
SweepPlan build_sweep(const RunConfig& c, int threads);

}  // namespace fracwave
