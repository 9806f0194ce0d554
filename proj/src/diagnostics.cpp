#include "fracwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

// Operators rebuilt from a trajectory's problem data.
struct Ops {
  RieszOperator riesz;
  EllipticOperator A;
  EllipticOperator At;  // transpose coefficients
  EllipticOperator B;

  explicit Ops(const ProblemSpec& p)
      : riesz(p.grid, p.s),
        A(make_operator_A(riesz, p.coeffs)),
        At(riesz, transpose(p.coeffs.A), p.coeffs.A_scalar),
        B(make_operator_B(riesz, p.coeffs)) {}
};

std::vector<double> gather(const Field& f, const std::vector<std::size_t>& idx) {
  std::vector<double> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = f.values[idx[k]];
  return out;
}

double idot(std::span<const double> a, std::span<const double> b, double dV) {
  return kernels::active().dot(a.data(), b.data(), a.size()) * dV;
}

// |D^s w|^2 for interior-supported w.
double hs_squared(const RieszOperator& R, const Field& w) {
  std::vector<double> tmp(w.values.size());
  R.fractional_laplacian(w.values, tmp, 1.0);
  return kernels::active().dot(w.values.data(), tmp.data(), tmp.size()) * w.grid.cell_volume();
}

}  // namespace

double EnergyReport::max_residual() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) m = std::max(m, r.residual);
  return m;
}

double EnergyReport::max_abs_residual() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.residual));
  return m;
}

EnergyReport energy_ledger(const Trajectory& traj) {
  const ProblemSpec& p = traj.spec();
  const Ops ops(p);
  const double dV = p.grid.cell_volume();
  const double h = traj.h();
  EnergyReport rep;
  double diss = 0.0, work = 0.0, E0 = 0.0;
  for (int j = 0; j <= traj.steps(); ++j) {
    const Field u = traj.u(j);
    const Field v = traj.v(j);
    EnergyRow row;
    row.t = traj.time(j);
    row.kinetic = 0.5 * inner(v, v);
    row.elastic = 0.5 * inner(u, ops.A.apply(u));
    row.penalty = p.graph.envelope_sum(traj.u_interior(j), p.epsilon) * dV;
    if (j > 0) {
      if (p.nu != 0.0) diss += p.nu * h * inner(v, ops.B.apply(v));
      work += h * inner(traj.forcing(j), v);
    }
    row.dissipation = diss;
    row.work = work;
    const double E = row.kinetic + row.elastic + row.penalty;
    if (j == 0) E0 = E;
    row.residual = E + diss - E0 - work;
    rep.rows.push_back(row);
  }
  return rep;
}

AprioriRow apriori_row(const Trajectory& traj, const std::string& label) {
  const ProblemSpec& p = traj.spec();
  const RieszOperator R(p.grid, p.s);
  const double h = traj.h();
  AprioriRow row;
  row.label = label;
  double sup = 0.0, visc = 0.0;
  for (int j = 0; j <= traj.steps(); ++j) {
    const Field u = traj.u(j);
    const Field v = traj.v(j);
    sup = std::max(sup, 0.5 * inner(v, v) + 0.5 * p.coeffs.a_lo * hs_squared(R, u));
    if (j > 0 && p.nu != 0.0) visc += h * hs_squared(R, v);
  }
  row.sup_energy = sup;
  row.dissipation = p.nu * p.coeffs.b_lo * visc;
  row.penalty_T =
      p.graph.envelope_sum(traj.u_interior(traj.steps()), p.epsilon) * p.grid.cell_volume();
  row.bound = row.sup_energy + row.dissipation + row.penalty_T;
  return row;
}

AprioriTable apriori_table(std::vector<AprioriRow> rows) {
  if (rows.empty()) throw DomainError("a-priori check needs at least one trajectory");
  AprioriTable t;
  t.rows = std::move(rows);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : t.rows) {
    lo = std::min(lo, r.bound);
    hi = std::max(hi, r.bound);
  }
  t.spread = lo > 0.0 ? (hi - lo) / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  t.flagged = t.spread > 0.10;
  return t;
}

AprioriTable apriori_check(const std::vector<const Trajectory*>& family,
                           const std::vector<std::string>& labels) {
  if (family.empty()) throw DomainError("a-priori check needs at least one trajectory");
  std::vector<AprioriRow> rows;
  for (std::size_t k = 0; k < family.size(); ++k)
    rows.push_back(apriori_row(*family[k], k < labels.size() ? labels[k] : std::to_string(k)));
  return apriori_table(std::move(rows));
}

double penalty_mass(const Trajectory& traj) {
  const double dV = traj.spec().grid.cell_volume();
  double s = 0.0;
  for (int j = 1; j <= traj.steps(); ++j) s += kernels::active().sum_abs(traj.force_interior(j).data(), traj.interior_size());
  return s * traj.h() * dV;
}

BvResult bv_functional(const Trajectory& traj, const Field& phi) {
  require_same_grid(phi.grid, traj.spec().grid);
  for (double x : phi.values)
    if (x < 0.0) throw DomainError("test function has negative nodes");
  if (!is_interior_supported(phi)) throw DomainError("test function must vanish outside omega");
  const auto p = gather(phi, traj.interior());
  const double dV = phi.grid.cell_volume();
  BvResult out;
  for (int j = 0; j <= traj.steps(); ++j) {
    out.values.push_back(idot(traj.v_interior(j), p, dV));
    if (j > 0) out.total_variation += std::abs(out.values[std::size_t(j)] - out.values[std::size_t(j) - 1]);
  }
  return out;
}

Field right_limit_velocity(const Trajectory& traj) {
  const int n = traj.steps();
  const int W = std::max(5, n / 100);
  if (n < W) throw DomainError("insufficient steps for the right-limit estimate");
  const double h = traj.h();
  double st = 0.0, stt = 0.0;
  for (int k = 1; k <= W; ++k) {
    const double t = (k - 0.5) * h;
    st += t;
    stt += t * t;
  }
  const double det = W * stt - st * st;
  std::vector<double> out(traj.interior_size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sy = 0.0, sty = 0.0;
    for (int k = 1; k <= W; ++k) {
      const double t = (k - 0.5) * h;
      const double y = traj.v_interior(k)[i];
      sy += y;
      sty += t * y;
    }
    // Intercept of the least-squares line.
    out[i] = (stt * sy - st * sty) / det;
  }
  return traj.expand(out);
}

void ResidualReport::add(ResidualEntry e) {
  if (entries.empty()) {
    min_value = e.value;
  } else {
    min_value = std::min(min_value, e.value);
  }
  max_abs = std::max(max_abs, std::abs(e.value));
  pass = pass && e.pass;
  entries.push_back(std::move(e));
}

std::vector<VeryWeakTerms> very_weak_terms(const Trajectory& traj,
                                           const std::vector<TestFunction>& tests) {
  const ProblemSpec& p = traj.spec();
  const Ops ops(p);
  const double dV = p.grid.cell_volume();
  const double T = p.T;
  const int n = traj.steps();
  const auto& idx = traj.interior();
  std::vector<std::vector<double>> g(std::size_t(n) + 1);
  for (int j = 1; j <= n; ++j) g[std::size_t(j)] = gather(traj.forcing(j), idx);
  const auto w1 = gather(p.w1, idx);

  std::vector<VeryWeakTerms> out;
  for (const auto& tf : tests) {
    check_test_function(tf, T);
    require_same_grid(tf.psi.grid, p.grid);
    const auto psi = gather(tf.psi, idx);
    // <A D^s u, D^s psi> = <u, -D^s.(A^T D^s psi)> for interior u.
    const auto zA = gather(ops.At.apply(tf.psi), idx);
    const auto zB = gather(ops.B.apply(tf.psi), idx);
    VeryWeakTerms t;
    for (int j = 1; j <= n; ++j) {
      const double t0 = traj.time(j - 1), t1 = traj.time(j);
      const double I = tf.eta.integral(t0, t1);
      const double deta = tf.eta(t1) - tf.eta(t0);
      t.inertia -= idot(traj.v_interior(j), psi, dV) * deta;
      t.elastic += idot(traj.u_interior(j), zA, dV) * I;
      t.viscous += idot(traj.v_interior(j), zB, dV) * I;
      t.forcing += idot(g[std::size_t(j)], psi, dV) * I;
      t.penalty += idot(traj.force_interior(j), psi, dV) * I;
    }
    t.initial = idot(w1, psi, dV) * tf.eta(0.0);
    out.push_back(t);
  }
  return out;
}

ResidualReport very_weak_residual(const Trajectory& traj, const std::vector<TestFunction>& tests,
                                  double nu, double tol) {
  const auto terms = very_weak_terms(traj, tests);
  ResidualReport rep;
  rep.name = "very_weak";
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const double r = terms[k].residual(nu);
    rep.add({tests[k].label, r, tol, r >= -tol});
  }
  return rep;
}

ResidualReport initial_condition_residual(const Trajectory& traj, const std::vector<Field>& psis,
                                          const InitialConditionOptions& opt) {
  const ProblemSpec& p = traj.spec();
  const Ops ops(p);
  const double dV = p.grid.cell_volume();
  const double h = traj.h();
  const int n = traj.steps();
  const auto& idx = traj.interior();
  const Field v0p = right_limit_velocity(traj);

  // Norms shared by every psi.
  const Field beta0 = [&] {
    Field f = Field::scalar(p.grid);
    p.graph.yosida(p.w0.values, p.epsilon, f.values);
    return f;
  }();
  const double data_scale = l2_norm(traj.forcing(1)) + l2_norm(ops.A.apply(p.w0)) +
                            p.nu * l2_norm(ops.B.apply(p.w1)) + l2_norm(beta0);
  double sup_v2 = 0.0, sup_g = 0.0, sup_Dsu = 0.0, Dsv_QT = 0.0, sup_beta = 0.0;
  std::vector<double> Dsu2(std::size_t(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const Field u = traj.u(j);
    Dsu2[std::size_t(j)] = hs_squared(ops.riesz, u);
    sup_Dsu = std::max(sup_Dsu, std::sqrt(Dsu2[std::size_t(j)]));
    const auto v = traj.v_interior(j);
    sup_v2 = std::max(sup_v2, idot(v, v, dV));
    const auto f = traj.force_interior(j);
    sup_beta = std::max(sup_beta, std::sqrt(idot(f, f, dV)));
    if (j > 0) {
      sup_g = std::max(sup_g, l2_norm(traj.forcing(j)));
      Dsv_QT += h * hs_squared(ops.riesz, traj.v(j));
    }
  }
  Dsv_QT = std::sqrt(Dsv_QT);
  const double a_hi = p.coeffs.a_hi, b_hi = p.coeffs.b_hi;

  ResidualReport rep;
  rep.name = "initial_condition";
  for (std::size_t k = 0; k < psis.size(); ++k) {
    const Field& psi = psis[k];
    require_same_grid(psi.grid, p.grid);
    for (double x : psi.values)
      if (x < 0.0) throw DomainError("test function has negative nodes");
    if (!is_interior_supported(psi)) throw DomainError("test function must vanish outside omega");

    Field dpsi = psi;
    kernels::axpy(-1.0, p.w0.values, dpsi.values);
    Field dv = v0p;
    kernels::axpy(-1.0, p.w1.values, dv.values);
    const double value = inner(dv, dpsi);
    const double tol = opt.tolerance >= 0.0 ? opt.tolerance : h * l2_norm(dpsi) * data_scale;
    rep.add({"pairing:" + std::to_string(k), value, tol, value >= -tol});

    // Short-time defect <v(t), psi - u(t)> - <w1, psi - w0> against
    // -C_t t - C_h t^(1/2).
    const auto ps = gather(psi, idx);
    const auto w1 = gather(p.w1, idx);
    const auto w0 = gather(p.w0, idx);
    std::vector<double> zpsi(psi.values.size());
    ops.riesz.fractional_laplacian(psi.values, zpsi, 1.0);
    std::vector<double> zi(idx.size());
    for (std::size_t q = 0; q < idx.size(); ++q) zi[q] = zpsi[idx[q]];
    const double Dspsi2 = idot(ps, zi, dV);
    bool feasible = p.graph.is_indicator();
    if (feasible)
      for (double x : ps)
        if (x < p.graph.a() || x > p.graph.b()) feasible = false;
    double sup_w = 0.0, sup_Dsw = 0.0;
    std::vector<double> w(idx.size());
    for (int j = 0; j <= n; ++j) {
      const auto u = traj.u_interior(j);
      for (std::size_t q = 0; q < w.size(); ++q) w[q] = ps[q] - u[q];
      sup_w = std::max(sup_w, std::sqrt(idot(w, w, dV)));
      const double cross = idot(u, zi, dV);
      sup_Dsw = std::max(sup_Dsw, std::sqrt(std::max(0.0, Dspsi2 - 2.0 * cross + Dsu2[std::size_t(j)])));
    }
    double C_t = sup_v2 + sup_g * sup_w + a_hi * sup_Dsu * sup_Dsw;
    if (!feasible) C_t += sup_beta * sup_w;
    const double C_h = p.nu * b_hi * Dsv_QT * sup_Dsw;
    std::vector<double> d0(idx.size());
    for (std::size_t q = 0; q < d0.size(); ++q) d0[q] = ps[q] - w0[q];
    const double base = idot(w1, d0, dV);
    double worst = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double t = traj.time(j);
      const auto u = traj.u_interior(j);
      for (std::size_t q = 0; q < w.size(); ++q) w[q] = ps[q] - u[q];
      const double defect = idot(traj.v_interior(j), w, dV) - base;
      const double bound = C_t * t + C_h * std::sqrt(t);
      if (defect < 0.0 && bound > 0.0) worst = std::max(worst, -defect / bound);
      if (defect < 0.0 && bound == 0.0) worst = std::numeric_limits<double>::infinity();
    }
    rep.add({"short_time:" + std::to_string(k), worst, 1.0, worst <= 1.0 + 1e-9});
  }
  return rep;
}

double penalty_dual_norm(const Trajectory& traj, const std::vector<TestFunction>& tests) {
  const ProblemSpec& p = traj.spec();
  const RieszOperator R(p.grid, p.s);
  const double dV = p.grid.cell_volume();
  const auto& idx = traj.interior();
  double best = 0.0;
  for (const auto& tf : tests) {
    check_test_function(tf, p.T);
    const auto psi = gather(tf.psi, idx);
    double num = 0.0;
    for (int j = 1; j <= traj.steps(); ++j)
      num += tf.eta.integral(traj.time(j - 1), traj.time(j)) * idot(traj.force_interior(j), psi, dV);
    const double psi2 = inner(tf.psi, tf.psi);
    const double dpsi2 = hs_squared(R, tf.psi);
    const double norm2 = (tf.eta.l2_squared() + tf.eta.derivative_l2_squared()) * psi2 +
                         tf.eta.l2_squared() * dpsi2;
    if (norm2 > 0.0) best = std::max(best, std::abs(num) / std::sqrt(norm2));
  }
  return best;
}

ConstraintViolation constraint_violation(const Trajectory& traj) {
  const MonotoneGraph& g = traj.spec().graph;
  if (!g.is_indicator()) throw DomainError("constraint violation needs an interval indicator graph");
  const double a = g.a(), b = g.b();
  const double dV = traj.spec().grid.cell_volume();
  ConstraintViolation out;
  double l2 = 0.0;
  for (int j = 0; j <= traj.steps(); ++j) {
    double sq = 0.0;
    for (double u : traj.u_interior(j)) {
      const double d = std::max(u - b, 0.0) + std::max(a - u, 0.0);
      out.linf = std::max(out.linf, d);
      sq += d * d;
    }
    if (j > 0) l2 += traj.h() * sq * dV;
  }
  out.l2_QT = std::sqrt(l2);
  return out;
}

namespace {

double vi_residual(const Trajectory& traj,
                   const std::function<void(int, const Field&, Field&)>& make_psi) {
  const ProblemSpec& p = traj.spec();
  const Ops ops(p);
  const double h = traj.h();
  double total = 0.0;
  Field psi = Field::scalar(p.grid);
  for (int j = 1; j <= traj.steps(); ++j) {
    const Field u = traj.u(j);
    const Field v = traj.v(j);
    make_psi(j, u, psi);
    Field w = psi;
    kernels::axpy(-1.0, u.values, w.values);
    mask_in_place(w);
    Field lhs = traj.a(j);
    kernels::axpy(1.0, ops.A.apply(u).values, lhs.values);
    if (p.nu != 0.0) kernels::axpy(p.nu, ops.B.apply(v).values, lhs.values);
    kernels::axpy(-1.0, traj.forcing(j).values, lhs.values);
    total += h * inner(lhs, w);
  }
  return total;
}

}  // namespace

double variational_inequality_residual(const Trajectory& traj, const Field& bump,
                                       const TimeProfile& eta) {
  require_same_grid(bump.grid, traj.spec().grid);
  for (double x : bump.values)
    if (x < 0.0) throw DomainError("bump must be nonnegative");
  const MonotoneGraph& g = traj.spec().graph;
  const double a = g.is_indicator() ? g.a() : -std::numeric_limits<double>::infinity();
  const double b = g.is_indicator() ? g.b() : std::numeric_limits<double>::infinity();
  return vi_residual(traj, [&](int j, const Field& u, Field& psi) {
    const double e = eta(traj.time(j));
    for (std::size_t i = 0; i < psi.values.size(); ++i)
      psi.values[i] = std::clamp(u.values[i], a, b) + e * bump.values[i];
  });
}

double variational_inequality_self(const Trajectory& traj) {
  return vi_residual(traj, [](int, const Field& u, Field& psi) { psi = u; });
}

namespace {

void require_comparable(const Trajectory& a, const Trajectory& b) {
  require_same_grid(a.spec().grid, b.spec().grid);
  if (a.steps() != b.steps() || a.h() != b.h())
    throw DomainError("trajectories must share the time grid");
}

}  // namespace

double distance_QT(const Trajectory& a, const Trajectory& b) {
  require_comparable(a, b);
  const double dV = a.spec().grid.cell_volume();
  double s = 0.0;
  for (int j = 1; j <= a.steps(); ++j) {
    const auto ua = a.u_interior(j), ub = b.u_interior(j);
    for (std::size_t i = 0; i < ua.size(); ++i) s += (ua[i] - ub[i]) * (ua[i] - ub[i]);
  }
  return std::sqrt(s * dV * a.h());
}

double distance_T(const Trajectory& a, const Trajectory& b) {
  require_comparable(a, b);
  const double dV = a.spec().grid.cell_volume();
  const auto ua = a.u_interior(a.steps()), ub = b.u_interior(b.steps());
  double s = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) s += (ua[i] - ub[i]) * (ua[i] - ub[i]);
  return std::sqrt(s * dV);
}

double norm_QT(const Trajectory& a) {
  const double dV = a.spec().grid.cell_volume();
  double s = 0.0;
  for (int j = 1; j <= a.steps(); ++j)
    for (double x : a.u_interior(j)) s += x * x;
  return std::sqrt(s * dV * a.h());
}

}  // namespace fracwave
