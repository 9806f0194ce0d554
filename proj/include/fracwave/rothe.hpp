#pragma once

// Rothe time discretisation of the penalised problem
//
//   (u_j - 2 u_{j-1} + u_{j-2}) / h^2 + A u_j + (nu / h) B (u_j - u_{j-1})
//     + beta_eps(u_j) = g_j,
//
// with u_0 = w0 and u_{-1} = w0 - h w1. Each step is solved by semismooth
// Newton with a right-preconditioned GMRES inner solve.

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwave/domain.hpp"
#include "fracwave/frac_ops.hpp"
#include "fracwave/gmres.hpp"
#include "fracwave/monotone.hpp"

namespace fracwave {

struct SolverOptions {
  double newton_rtol = 1e-10;
  double newton_atol = 1e-12;
  int newton_max_iters = 50;
  int armijo_max_halvings = 20;
  double armijo_c = 1e-4;
  GmresOptions krylov{50, 200, 1e-12, 0.0};
};

struct ProblemSpec {
  GridSpec grid;
  CoefficientField coeffs;
  double s = 0.5;
  double nu = 0.0;
  double epsilon = 0.1;
  MonotoneGraph graph = MonotoneGraph::free();
  Field g;   // time-independent forcing
  // Optional time-dependent forcing; when set, g_j = forcing(t_j) replaces g.
  std::function<Field(double t)> forcing;
  Field w0;
  Field w1;
  double T = 1.0;
  int steps = 100;
  bool allow_inviscid = false;
  SolverOptions solver;

  double h() const { return T / steps; }
};

// Throws DomainError / MonotoneError on invalid data.
void validate(const ProblemSpec& spec);

class StepFailure : public std::runtime_error {
 public:
  StepFailure(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

struct StepStats {
  int newton_iters = 0;
  int krylov_iters = 0;
  int halvings = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  std::vector<double> newton_history;  // residual norm after each accepted iterate
};

// Cached operators for one problem.
class RotheSolver {
 public:
  explicit RotheSolver(const ProblemSpec& spec);

  const ProblemSpec& spec() const { return spec_; }
  double h() const { return h_; }
  const RieszOperator& riesz() const { return riesz_; }
  const EllipticOperator& op_A() const { return A_; }
  const EllipticOperator& op_B() const { return B_; }

  // One step: returns u_j given u_{j-1}, u_{j-2} and g_j (full arrays).
  std::vector<double> step(int j, std::span<const double> u1, std::span<const double> u2,
                           std::span<const double> g, StepStats* stats) const;

  // Nonlinear residual F(u) of the step equation (masked), for testing.
  void residual(std::span<const double> u, std::span<const double> u1,
                std::span<const double> u2, std::span<const double> g,
                std::span<double> out) const;

 private:
  ProblemSpec spec_;
  double h_;
  RieszOperator riesz_;
  EllipticOperator A_;
  EllipticOperator B_;
  bool fast_;         // both coefficients are constant multiples of the identity
  double pc_shift_;   // 1 / h^2
  double pc_scale_;   // a_bar + nu b_bar / h

  void linear_part(std::span<const double> x, std::span<double> out) const;
};

// Trajectory storage keeps only the Omega nodes of u_j, v_j and beta_eps(u_j)
// for j = 0..n; full grid fields are reassembled on demand.
class Trajectory {
 public:
  Trajectory(std::shared_ptr<const ProblemSpec> spec);

  const ProblemSpec& spec() const { return *spec_; }
  std::shared_ptr<const ProblemSpec> spec_ptr() const { return spec_; }
  int steps() const { return n_; }
  double h() const { return h_; }
  double time(int j) const { return j * h_; }
  std::size_t interior_size() const { return m_; }
  const std::vector<std::size_t>& interior() const { return idx_; }

  std::span<const double> u_interior(int j) const;
  std::span<const double> v_interior(int j) const;
  std::span<const double> force_interior(int j) const;

  Field u(int j) const;
  Field v(int j) const;
  // (v_j - v_{j-1}) / h, j >= 1.
  Field a(int j) const;
  Field force(int j) const;
  // Forcing g_j used at step j.
  Field forcing(int j) const;

  std::vector<StepStats> stats;

  void store(int j, std::span<const double> u_full, std::span<const double> v_full,
             std::span<const double> force_full);
  Field expand(std::span<const double> interior_values) const;

 private:
  std::shared_ptr<const ProblemSpec> spec_;
  int n_;
  double h_;
  std::size_t m_;
  std::vector<std::size_t> idx_;
  std::vector<double> u_, v_, f_;
};

Trajectory run(const ProblemSpec& spec);

struct Interpolants {
  Field u_pc;      // u_n(t) = u_j on (t_{j-1}, t_j]
  Field v_pc;
  Field U_affine;  // piecewise-affine interpolation of u_j
  Field V_affine;
};

Interpolants interpolants(const Trajectory& traj, double t);

}  // namespace fracwave
