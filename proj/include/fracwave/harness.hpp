#pragma once

// Parameter sweeps along epsilon, viscosity, fractional order and time step,
// with successive-difference tables and the residual studies built on them.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracwave/diagnostics.hpp"
#include "fracwave/rothe.hpp"

namespace fracwave {

enum class SweepAxis { Epsilon, Viscosity, ExponentS, Timestep };

std::string to_string(SweepAxis a);
// Accepts epsilon | viscosity | exponent_s | timestep.
SweepAxis parse_axis(const std::string& name);

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepPlan {
  ProblemSpec base;
  SweepAxis axis = SweepAxis::Epsilon;
  std::vector<double> values;  // strictly monotone; step counts for Timestep
  int test_count = 50;
  std::uint64_t seed = 1;
  int threads = 1;
  // Very weak tolerance C1 h + C2 eps; negative C1 reports without judging.
  double tol_c1 = -1.0;
  double tol_c2 = 0.0;
  // Differences below this count as converged rather than non-decreasing.
  double zero_gap = 1e-10;
  std::string output;
};

// Throws SweepError on empty or non-monotone value lists and on values that
// are invalid for the axis.
void validate_plan(const SweepPlan& plan);

constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct SweepMember {
  double value = 0.0;
  int steps = 0;
  double h = 0.0;
  double epsilon = 0.0;
  double nu = 0.0;
  double s = 0.0;
  double violation_l2 = kNotApplicable;  // NaN for non-indicator graphs
  double violation_linf = kNotApplicable;
  double penalty_mass = 0.0;
  double bv_variation = 0.0;
  AprioriRow apriori;
  double energy_residual = 0.0;    // final ledger residual
  double vw_min = 0.0;             // very weak residual with the viscous term
  double vw_max = 0.0;
  double vw_inviscid_min = 0.0;    // same with nu = 0
  double vw_tolerance = kNotApplicable;
  bool vw_pass = true;
  double viscous_pairing = 0.0;    // max over tests of |nu sum <B D^s v, D^s phi> I_j|
  double identity_max_abs = 0.0;   // weak identity with the penalty pairing
  double vi_residual = kNotApplicable;
  double vi_self = kNotApplicable;
  double reference_QT = kNotApplicable;  // distance to the s = 1 run
  double reference_T = kNotApplicable;
  int newton_iters = 0;
  int krylov_iters = 0;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::Epsilon;
  std::vector<SweepMember> members;  // in plan order
  std::optional<SweepMember> reference;  // s = 1 run of an exponent sweep
  std::vector<double> cauchy_QT;     // |u_{k+1} - u_k| in L2(Q_T)
  std::vector<double> cauchy_T;      // |u_{k+1}(T) - u_k(T)| in L2(Omega)
  std::vector<double> rates;         // log(d_k / d_{k+1}) / log(x_k / x_{k+1})
  bool cauchy_decreasing = true;
  bool violation_decreasing = true;
  bool reference_decreasing = true;
  double envelope_C = kNotApplicable;  // viscous pairing constant P(nu_max) / sqrt(nu_max)
  bool envelope_ok = true;
  double sigma = kNotApplicable;       // smallest s of an exponent sweep
  AprioriTable apriori;
  bool pass = true;
  std::vector<std::string> notes;
};

// Strictly decreasing, with a run of values below zero_gap treated as converged.
bool decreasing_sequence(const std::vector<double>& d, double zero_gap);

// L2(Q_T) distance between piecewise-constant-in-time trajectories whose step
// counts divide one another.
double distance_QT_any(const Trajectory& a, const Trajectory& b);

SweepReport sweep_epsilon(const SweepPlan& plan);
SweepReport sweep_viscosity(const SweepPlan& plan);
SweepReport sweep_exponent(const SweepPlan& plan);
SweepReport sweep_timestep(const SweepPlan& plan);
SweepReport run_sweep(const SweepPlan& plan);

// C1 = 2 max |very weak residual| / h on the given (free) problem.
double calibrate_tolerance(const ProblemSpec& free_problem, int test_count, std::uint64_t seed);

// Runs spec at each (steps, epsilon) pair and records the weak identity
// residual (two-sided), the very weak residual and the variational inequality
// residual against psi = P(u) + eta bump.
SweepReport weak_solution_residual_study(const ProblemSpec& spec,
                                         const std::vector<std::pair<int, double>>& resolutions,
                                         int test_count = 50, std::uint64_t seed = 1,
                                         int threads = 1);

}  // namespace fracwave
