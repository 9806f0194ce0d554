#pragma once

// Evaluators for energy balances, a-priori bounds and residuals of the
// weak / very weak formulations on computed trajectories.

#include <string>
#include <vector>

#include "fracwave/rothe.hpp"
#include "fracwave/test_library.hpp"

namespace fracwave {

struct EnergyRow {
  double t = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double penalty = 0.0;
  double dissipation = 0.0;  // cumulative
  double work = 0.0;         // cumulative
  double residual = 0.0;     // E(t) + dissipation - E(0) - work
};

struct EnergyReport {
  std::vector<EnergyRow> rows;
  double max_residual() const;   // most positive residual
  double max_abs_residual() const;
  double final_residual() const { return rows.empty() ? 0.0 : rows.back().residual; }
};

// Cumulative terms use the quadrature implied by testing step j with v_j:
// dissipation_j = nu sum_{k<=j} h <B D^s v_k, D^s v_k>, work_j = sum_{k<=j} h <g_k, v_k>.
EnergyReport energy_ledger(const Trajectory& traj);

struct AprioriRow {
  std::string label;
  double sup_energy = 0.0;   // sup_t [1/2 |v|^2 + a_lo/2 |D^s u|^2]
  double dissipation = 0.0;  // nu b_lo |D^s v|^2 over Q_T
  double penalty_T = 0.0;    // int j_eps(u(T))
  double bound = 0.0;
};

struct AprioriTable {
  std::vector<AprioriRow> rows;
  double spread = 0.0;  // (max - min) / min of the bound column
  bool flagged = false; // spread above 10 %
};

AprioriRow apriori_row(const Trajectory& traj, const std::string& label);
AprioriTable apriori_check(const std::vector<const Trajectory*>& family,
                           const std::vector<std::string>& labels = {});
AprioriTable apriori_table(std::vector<AprioriRow> rows);

// sum_j h sum_i |beta_eps(u_j)| dx over j = 1..n.
double penalty_mass(const Trajectory& traj);

struct BvResult {
  std::vector<double> values;  // <v_j, phi>, j = 0..n
  double total_variation = 0.0;
};

BvResult bv_functional(const Trajectory& traj, const Field& phi);

// Per-node least-squares line through (t_j - h/2, v_j), j = 1..W with
// W = max(5, n/100), evaluated at t = 0.
Field right_limit_velocity(const Trajectory& traj);

struct ResidualEntry {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct ResidualReport {
  std::string name;
  std::vector<ResidualEntry> entries;
  double min_value = 0.0;
  double max_abs = 0.0;
  bool pass = true;

  void add(ResidualEntry e);
};

struct VeryWeakTerms {
  double inertia = 0.0;   // -sum <v_j, psi> (eta(t_j) - eta(t_{j-1}))
  double elastic = 0.0;   // sum <A D^s u_j, D^s psi> I_j
  double viscous = 0.0;   // sum <B D^s v_j, D^s psi> I_j (without nu)
  double initial = 0.0;   // <w1, psi> eta(0)
  double forcing = 0.0;   // sum <g_j, psi> I_j
  double penalty = 0.0;   // sum <beta_eps(u_j), psi> I_j

  // Very weak residual with viscosity nu.
  double residual(double nu) const { return inertia + elastic + nu * viscous - initial - forcing; }
  // Weak identity residual with the penalty pairing in place of the multiplier.
  double identity_residual(double nu) const { return residual(nu) + penalty; }
};

std::vector<VeryWeakTerms> very_weak_terms(const Trajectory& traj,
                                           const std::vector<TestFunction>& tests);

// PASS iff every residual >= -tol.
ResidualReport very_weak_residual(const Trajectory& traj, const std::vector<TestFunction>& tests,
                                  double nu, double tol);

struct InitialConditionOptions {
  // Negative means the default h |psi - w0| (|g| + |A w0| + nu |B w1| + |beta_eps(w0)|).
  double tolerance = -1.0;
};

// Entries "pairing:<k>" hold <v(0+) - w1, psi - w0>; entries "short_time:<k>"
// hold the worst ratio of the short-time defect to C (t + t^(1/2)) with C
// built from trajectory norms (pass iff <= 1 up to O(h)).
ResidualReport initial_condition_residual(const Trajectory& traj, const std::vector<Field>& psis,
                                          const InitialConditionOptions& opt = {});

// sup over tests of |int <beta_eps(u), phi>| / |phi|_{V_s}, with
// |phi|^2 = |phi|^2_{H^1(0,T;L^2)} + |D^s phi|^2_{L^2(Q_T)}.
double penalty_dual_norm(const Trajectory& traj, const std::vector<TestFunction>& tests);

struct ConstraintViolation {
  double linf = 0.0;
  double l2_QT = 0.0;
};

ConstraintViolation constraint_violation(const Trajectory& traj);

// sum_j h [<a_j, psi_j - u_j> + <A D^s u_j, D^s(psi_j - u_j)>
//          + nu <B D^s v_j, D^s(psi_j - u_j)> - <g_j, psi_j - u_j>]
// with psi_j = P(u_j) + eta(t_j) bump, P the projection onto the constraint
// interval. Nonnegative for solutions of the variational inequality.
double variational_inequality_residual(const Trajectory& traj, const Field& bump,
                                       const TimeProfile& eta);

// Same quantity with psi_j = u_j; vanishes identically.
double variational_inequality_self(const Trajectory& traj);

// L2(Q_T) and L2(Omega) at T distances between two trajectories on the same grid
// and time grid (piecewise constant in time, j = 1..n).
double distance_QT(const Trajectory& a, const Trajectory& b);
double distance_T(const Trajectory& a, const Trajectory& b);
double norm_QT(const Trajectory& a);

}  // namespace fracwave
