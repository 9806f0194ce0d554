#include "fracwave/rothe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

double mean_trace(const MatrixField& M) {
  double s = 0.0;
  for (int p = 0; p < M.d; ++p) {
    const double* e = M.entry(p, p);
    for (std::size_t i = 0; i < M.points; ++i) s += e[i];
  }
  return s / (double(M.d) * double(M.points));
}

std::string fmt(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

void validate(const ProblemSpec& spec) {
  const GridSpec& g = spec.grid;
  if (!(spec.s > 0.0) || spec.s > 1.0) throw DomainError("s must lie in (0,1]");
  require_epsilon(spec.epsilon);
  if (!(spec.nu >= 0.0)) throw DomainError("viscosity must be nonnegative");
  if (spec.nu == 0.0 && !spec.allow_inviscid)
    throw DomainError("nu = 0 requires opting into the inviscid penalised run");
  if (!(spec.T > 0.0)) throw DomainError("horizon must be positive");
  if (spec.steps < 1) throw DomainError("steps must be positive");
  require_same_grid(spec.coeffs.grid, g);
  for (const Field* f : {&spec.w0, &spec.w1, &spec.g}) {
    require_same_grid(f->grid, g);
    if (f->components != 1) throw DomainError("data fields must be scalar");
  }
  if (!is_interior_supported(spec.w0)) throw DomainError("w0 must vanish outside omega");
  if (!is_interior_supported(spec.w1)) throw DomainError("w1 must vanish outside omega");
  if (!is_interior_supported(spec.g)) throw DomainError("g must vanish outside omega");
  if (spec.graph.is_indicator()) {
    for (double v : spec.w0.values)
      if (v < spec.graph.a() || v > spec.graph.b())
        throw DomainError("w0 violates the constraint a <= w0 <= b");
  }
}

RotheSolver::RotheSolver(const ProblemSpec& spec)
    : spec_((validate(spec), spec)),
      h_(spec.h()),
      riesz_(spec.grid, spec.s),
      A_(make_operator_A(riesz_, spec.coeffs)),
      B_(make_operator_B(riesz_, spec.coeffs)) {
  fast_ = A_.scalar_multiple() != 0.0 && B_.scalar_multiple() != 0.0;
  pc_shift_ = 1.0 / (h_ * h_);
  pc_scale_ = mean_trace(spec.coeffs.A) + spec.nu * mean_trace(spec.coeffs.B) / h_;
}

void RotheSolver::linear_part(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = x.size();
  const double ih2 = 1.0 / (h_ * h_);
  if (fast_) {
    const double coef = A_.scalar_multiple() + spec_.nu * B_.scalar_multiple() / h_;
    riesz_.fractional_laplacian(x, out, coef);
    mask_in_place(spec_.grid, out);
  } else {
    A_.apply(x, out);
    if (spec_.nu != 0.0) {
      std::vector<double> tmp(n);
      B_.apply(x, tmp);
      kernels::axpy(spec_.nu / h_, tmp, out);
    }
  }
  kernels::axpy(ih2, x, out);
}

void RotheSolver::residual(std::span<const double> u, std::span<const double> u1,
                           std::span<const double> u2, std::span<const double> g,
                           std::span<double> out) const {
  const std::size_t n = u.size();
  const double ih2 = 1.0 / (h_ * h_);
  std::vector<double> tmp(n), du(n), beta(n);
  linear_part(u, out);
  // Subtract (2 u1 - u2) / h^2 + (nu / h) B u1 + g.
  for (std::size_t i = 0; i < n; ++i) du[i] = 2.0 * u1[i] - u2[i];
  kernels::axpy(-ih2, du, out);
  if (spec_.nu != 0.0) {
    B_.apply(u1, tmp);
    kernels::axpy(-spec_.nu / h_, tmp, out);
  }
  kernels::axpy(-1.0, g, out);
  spec_.graph.yosida(u, spec_.epsilon, beta);
  kernels::axpy(1.0, beta, out);
  mask_in_place(spec_.grid, out);
}

std::vector<double> RotheSolver::step(int j, std::span<const double> u1,
                                      std::span<const double> u2, std::span<const double> g,
                                      StepStats* stats) const {
  const GridSpec& grid = spec_.grid;
  const std::size_t n = u1.size();
  const double dV = grid.cell_volume();
  const double ih2 = 1.0 / (h_ * h_);
  const double eps = spec_.epsilon;
  const MonotoneGraph& graph = spec_.graph;
  auto norm = [&](std::span<const double> v) { return std::sqrt(kernels::dot(v, v) * dV); };

  std::vector<double> rhs(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = (2.0 * u1[i] - u2[i]) * ih2 + g[i];
  if (spec_.nu != 0.0) {
    B_.apply(u1, tmp);
    kernels::axpy(spec_.nu / h_, tmp, rhs);
  }
  mask_in_place(grid, rhs);

  std::vector<double> u(n), F(n), D(n), beta(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * u1[i] - u2[i];
  mask_in_place(grid, u);

  auto eval = [&](std::span<const double> x, std::span<double> Fx, std::span<double> Dx) {
    linear_part(x, Fx);
    graph.yosida(x, eps, beta, Dx);
    kernels::axpy(1.0, beta, Fx);
    kernels::axpy(-1.0, rhs, Fx);
    mask_in_place(grid, Fx);
    return norm(Fx);
  };

  double nF = eval(u, F, D);
  const double tol =
      spec_.solver.newton_rtol * std::max(norm(g), norm(rhs)) + spec_.solver.newton_atol;
  StepStats st;
  st.tolerance = tol;
  st.newton_history.push_back(nF);

  const LinearMap J = [&](std::span<const double> x, std::span<double> out) {
    linear_part(x, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += D[i] * x[i];
  };
  const LinearMap P = [&](std::span<const double> x, std::span<double> out) {
    riesz_.shifted_inverse(x, out, pc_shift_, pc_scale_);
    mask_in_place(grid, out);
  };

  std::vector<double> delta(n), trial(n), Ft(n), Dt(n), minusF(n);
  while (nF > tol) {
    if (st.newton_iters >= spec_.solver.newton_max_iters)
      throw StepFailure(j, fmt("Newton did not converge (residual %.3e > tolerance %.3e)", nF, tol));
    ++st.newton_iters;
    for (std::size_t i = 0; i < n; ++i) minusF[i] = -F[i];
    std::fill(delta.begin(), delta.end(), 0.0);
    const GmresResult kr = gmres(J, P, minusF, delta, spec_.solver.krylov);
    st.krylov_iters += kr.iterations;
    if (!(kr.residual < std::sqrt(kernels::dot(minusF, minusF))))
      throw StepFailure(j, fmt("Krylov breakdown (residual %.3e, rhs %.3e)", kr.residual,
                               std::sqrt(kernels::dot(minusF, minusF))));
    double t = 1.0;
    int halvings = 0;
    double nt = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * delta[i];
      nt = eval(trial, Ft, Dt);
      if (nt <= (1.0 - spec_.solver.armijo_c * t) * nF) break;
      if (halvings == spec_.solver.armijo_max_halvings) break;
      t *= 0.5;
      ++halvings;
    }
    st.halvings += halvings;
    if (!(nt < nF) && nt > tol)
      throw StepFailure(j, fmt("line search failed to reduce the residual (%.3e >= %.3e)", nt, nF));
    u.swap(trial);
    F.swap(Ft);
    D.swap(Dt);
    nF = nt;
    st.newton_history.push_back(nF);
  }
  st.residual = nF;
  if (stats) *stats = std::move(st);
  return u;
}

Trajectory::Trajectory(std::shared_ptr<const ProblemSpec> spec)
    : spec_(std::move(spec)),
      n_(spec_->steps),
      h_(spec_->h()),
      idx_(spec_->grid.interior_indices()) {
  m_ = idx_.size();
  const std::size_t total = std::size_t(n_ + 1) * m_;
  u_.assign(total, 0.0);
  v_.assign(total, 0.0);
  f_.assign(total, 0.0);
  stats.resize(std::size_t(n_) + 1);
}

void Trajectory::store(int j, std::span<const double> u_full, std::span<const double> v_full,
                       std::span<const double> force_full) {
  const std::size_t base = std::size_t(j) * m_;
  for (std::size_t k = 0; k < m_; ++k) {
    u_[base + k] = u_full[idx_[k]];
    v_[base + k] = v_full[idx_[k]];
    f_[base + k] = force_full[idx_[k]];
  }
}

std::span<const double> Trajectory::u_interior(int j) const {
  return {u_.data() + std::size_t(j) * m_, m_};
}
std::span<const double> Trajectory::v_interior(int j) const {
  return {v_.data() + std::size_t(j) * m_, m_};
}
std::span<const double> Trajectory::force_interior(int j) const {
  return {f_.data() + std::size_t(j) * m_, m_};
}

Field Trajectory::expand(std::span<const double> vals) const {
  Field f = Field::scalar(spec_->grid);
  for (std::size_t k = 0; k < m_; ++k) f.values[idx_[k]] = vals[k];
  return f;
}

Field Trajectory::u(int j) const { return expand(u_interior(j)); }
Field Trajectory::v(int j) const { return expand(v_interior(j)); }
Field Trajectory::force(int j) const { return expand(force_interior(j)); }

Field Trajectory::a(int j) const {
  if (j < 1 || j > n_) throw DomainError("acceleration is defined for j = 1..n");
  Field out = v(j);
  const auto prev = v_interior(j - 1);
  for (std::size_t k = 0; k < m_; ++k) out.values[idx_[k]] = (out.values[idx_[k]] - prev[k]) / h_;
  return out;
}

Field Trajectory::forcing(int j) const {
  if (!spec_->forcing) return spec_->g;
  Field g = spec_->forcing(time(j));
  require_same_grid(g.grid, spec_->grid);
  mask_in_place(g);
  return g;
}

Trajectory run(const ProblemSpec& spec_in) {
  auto spec = std::make_shared<const ProblemSpec>(spec_in);
  const RotheSolver solver(*spec);
  Trajectory traj(spec);
  const double h = spec->h();
  const std::size_t n = spec->grid.points();
  const double eps = spec->epsilon;

  std::vector<double> u2(n), u1 = spec->w0.values, v(n), force(n);
  for (std::size_t i = 0; i < n; ++i) u2[i] = spec->w0.values[i] - h * spec->w1.values[i];
  for (std::size_t i = 0; i < n; ++i) v[i] = (u1[i] - u2[i]) / h;
  spec->graph.yosida(u1, eps, force);
  traj.store(0, u1, v, force);

  for (int j = 1; j <= spec->steps; ++j) {
    const Field g = traj.forcing(j);
    StepStats st;
    std::vector<double> u = solver.step(j, u1, u2, g.values, &st);
    for (std::size_t i = 0; i < n; ++i) v[i] = (u[i] - u1[i]) / h;
    spec->graph.yosida(u, eps, force);
    traj.store(j, u, v, force);
    traj.stats[std::size_t(j)] = std::move(st);
    u2.swap(u1);
    u1.swap(u);
  }
  return traj;
}

Interpolants interpolants(const Trajectory& traj, double t) {
  const double T = traj.spec().T;
  if (!(t >= 0.0 && t <= T)) throw DomainError("time outside [0, T]");
  const double tau = t / traj.h();
  int j = int(std::ceil(tau));
  const double nearest = std::round(tau);
  if (std::abs(tau - nearest) <= 1e-12 * std::max(1.0, tau)) j = int(nearest);
  j = std::clamp(j, 0, traj.steps());
  Interpolants out;
  out.u_pc = traj.u(j);
  out.v_pc = traj.v(j);
  if (j == 0 || std::abs(tau - j) <= 1e-12 * std::max(1.0, tau)) {
    out.U_affine = out.u_pc;
    out.V_affine = out.v_pc;
    return out;
  }
  const double theta = tau - (j - 1);
  out.U_affine = traj.u(j);
  out.V_affine = traj.v(j);
  const Field u0 = traj.u(j - 1), v0 = traj.v(j - 1);
  for (std::size_t i = 0; i < out.U_affine.values.size(); ++i) {
    out.U_affine.values[i] = (1.0 - theta) * u0.values[i] + theta * out.U_affine.values[i];
    out.V_affine.values[i] = (1.0 - theta) * v0.values[i] + theta * out.V_affine.values[i];
  }
  return out;
}

}  // namespace fracwave
