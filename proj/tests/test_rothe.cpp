#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fracwave/gmres.hpp"
#include "fracwave/profiles.hpp"
#include "fracwave/rothe.hpp"
#include "fracwave/scenarios.hpp"

using namespace fracwave;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

// Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<double> A, std::vector<double> b, int n) {
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A[std::size_t(r * n + c)]) > std::abs(A[std::size_t(p * n + c)])) p = r;
    for (int k = 0; k < n; ++k) std::swap(A[std::size_t(c * n + k)], A[std::size_t(p * n + k)]);
    std::swap(b[std::size_t(c)], b[std::size_t(p)]);
    for (int r = c + 1; r < n; ++r) {
      const double f = A[std::size_t(r * n + c)] / A[std::size_t(c * n + c)];
      for (int k = c; k < n; ++k) A[std::size_t(r * n + k)] -= f * A[std::size_t(c * n + k)];
      b[std::size_t(r)] -= f * b[std::size_t(c)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int r = n - 1; r >= 0; --r) {
    double s = b[std::size_t(r)];
    for (int k = r + 1; k < n; ++k) s -= A[std::size_t(r * n + k)] * x[std::size_t(k)];
    x[std::size_t(r)] = s / A[std::size_t(r * n + r)];
  }
  return x;
}

ProblemSpec small_string(const MonotoneGraph& graph) {
  ScenarioParams p;
  p.N = 128;
  p.steps = 40;
  p.T = 0.5;
  ProblemSpec spec = bouncing_string(p);
  spec.graph = graph;
  return spec;
}

}  // namespace

TEST_CASE("GMRES matches a dense direct solve") {
  const int n = 40;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> A(std::size_t(n * n)), b(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      A[std::size_t(r * n + c)] = (r == c ? 2.0 + r * 0.1 : 0.0) + 0.3 * nd(rng) / std::sqrt(n);
  for (double& x : b) x = nd(rng);
  const LinearMap op = [&](std::span<const double> in, std::span<double> out) {
    for (int r = 0; r < n; ++r) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += A[std::size_t(r * n + c)] * in[std::size_t(c)];
      out[std::size_t(r)] = s;
    }
  };
  const LinearMap jacobi = [&](std::span<const double> in, std::span<double> out) {
    for (int r = 0; r < n; ++r) out[std::size_t(r)] = in[std::size_t(r)] / A[std::size_t(r * n + r)];
  };
  const auto ref = dense_solve(A, b, n);
  for (const LinearMap* pc : {static_cast<const LinearMap*>(nullptr), &jacobi}) {
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    const auto res = gmres(op, pc ? *pc : LinearMap{}, b, x, {10, 500, 1e-13, 0.0});
    CHECK(res.converged);
    CHECK(res.residual <= 1e-12 * std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0)));
    CHECK(max_abs_diff(x, ref) <= 1e-10 * max_abs(ref));
  }
  std::vector<double> zero_b(static_cast<std::size_t>(n), 0.0), x(static_cast<std::size_t>(n), 0.0);
  const auto res = gmres(op, {}, zero_b, x);
  CHECK(res.converged);
  CHECK(max_abs(x) == 0.0);
}

TEST_CASE("problem validation") {
  ProblemSpec spec = small_string(MonotoneGraph::lower());
  CHECK_NOTHROW(validate(spec));
  auto bad = spec;
  bad.s = 1.5;
  CHECK_THROWS_WITH_AS(validate(bad), "s must lie in (0,1]", DomainError);
  bad = spec;
  bad.nu = 0.0;
  CHECK_THROWS_WITH_AS(validate(bad), "nu = 0 requires opting into the inviscid penalised run",
                       DomainError);
  bad.allow_inviscid = true;
  CHECK_NOTHROW(validate(bad));
  bad = spec;
  bad.steps = 0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = spec;
  bad.w0.values[bad.grid.interior_indices()[5]] = -1.0;
  CHECK_THROWS_WITH_AS(validate(bad), "w0 violates the constraint a <= w0 <= b", DomainError);
  bad = spec;
  bad.w1.values[0] = 1.0;
  CHECK_THROWS_WITH_AS(validate(bad), "w1 must vanish outside omega", DomainError);
  bad = spec;
  bad.epsilon = 2.0;
  CHECK_THROWS_AS(validate(bad), MonotoneError);
}

TEST_CASE("single torus mode follows the scalar recursion") {
  ScenarioParams p;
  p.N = 32;
  p.steps = 200;
  p.T = 1.0;
  p.s = 0.6;
  p.nu = 0.05;
  const int k = 2;
  ProblemSpec spec = torus_mode(p, k);
  spec.coeffs = CoefficientField::identity(spec.grid, 1.5, 0.5);
  const Trajectory traj = run(spec);

  const double h = spec.h(), S = std::pow(2.0 * M_PI * k, 2.0 * p.s);
  const double a = 1.5 * S, b = 0.5 * S * p.nu;
  double prev2 = 1.0 - h * 0.5, prev1 = 1.0, err = 0.0;
  for (int j = 1; j <= spec.steps; ++j) {
    const double cur = ((2.0 * prev1 - prev2) / (h * h) + b / h * prev1) / (1.0 / (h * h) + a + b / h);
    const Field u = traj.u(j);
    for (int i = 0; i < spec.grid.N; ++i)
      err = std::max(err, std::abs(u.values[std::size_t(i)] -
                                   cur * std::sin(2.0 * M_PI * k * spec.grid.coord(i))));
    prev2 = prev1;
    prev1 = cur;
  }
  CHECK(err <= 1e-10);
}

TEST_CASE("zero data stays at rest") {
  ProblemSpec spec = small_string(MonotoneGraph::lower());
  spec.w0 = Field::scalar(spec.grid);
  spec.w1 = Field::scalar(spec.grid);
  const Trajectory traj = run(spec);
  for (int j = 0; j <= traj.steps(); ++j) {
    CHECK(max_abs(traj.u_interior(j)) == 0.0);
    CHECK(max_abs(traj.force_interior(j)) == 0.0);
  }
}

TEST_CASE("accepted steps satisfy the discrete equation") {
  ProblemSpec spec = small_string(MonotoneGraph::lower());
  const RotheSolver solver(spec);
  const Trajectory traj = run(spec);
  std::vector<double> r(spec.grid.points());
  Field um1 = spec.w0;
  for (std::size_t i = 0; i < um1.values.size(); ++i) um1.values[i] -= spec.h() * spec.w1.values[i];
  for (int j = 1; j <= traj.steps(); ++j) {
    const Field prev2 = j >= 2 ? traj.u(j - 2) : um1;
    solver.residual(traj.u(j).values, traj.u(j - 1).values, prev2.values, spec.g.values, r);
    const auto& st = traj.stats[std::size_t(j)];
    CHECK(st.newton_iters >= 1);
    CHECK(std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0)) <=
          st.tolerance * 1.0000001 + 1e-300);
    // Velocity is the backward difference quotient.
    const auto u = traj.u_interior(j), u1 = traj.u_interior(j - 1), v = traj.v_interior(j);
    for (std::size_t k = 0; k < u.size(); ++k)
      CHECK(v[k] == doctest::Approx((u[k] - u1[k]) / spec.h()).epsilon(1e-12).scale(1.0));
  }
  CHECK(max_abs_diff(traj.v(0).values, spec.w1.values) <= 1e-12);
}

TEST_CASE("an obstacle far below the motion does not change the solution") {
  const Trajectory free = run(small_string(MonotoneGraph::free()));
  const Trajectory far = run(small_string(MonotoneGraph::lower(-100.0)));
  for (int j = 0; j <= free.steps(); ++j) {
    CHECK(max_abs_diff(free.u_interior(j), far.u_interior(j)) <= 1e-13);
    CHECK(max_abs(far.force_interior(j)) == 0.0);
  }
}

TEST_CASE("contact produces a penalty force") {
  const Trajectory traj = run(small_string(MonotoneGraph::lower()));
  double most_negative = 0.0;
  for (int j = 0; j <= traj.steps(); ++j)
    for (double f : traj.force_interior(j)) most_negative = std::min(most_negative, f);
  CHECK(most_negative < 0.0);
}

TEST_CASE("matrix coefficients equal to multiples of the identity use the same operator") {
  ProblemSpec a = small_string(MonotoneGraph::lower());
  a.coeffs = CoefficientField::identity(a.grid, 2.0, 1.0);
  ProblemSpec b = a;
  b.coeffs = CoefficientField::from_matrices(b.grid, constant_matrix(b.grid, {2.0}),
                                             constant_matrix(b.grid, {1.0}));
  const Trajectory ta = run(a), tb = run(b);
  const double scale = max_abs(ta.u_interior(ta.steps()));
  CHECK(max_abs_diff(ta.u_interior(ta.steps()), tb.u_interior(tb.steps())) <= 1e-9 * scale);
}

TEST_CASE("two-dimensional membrane with an obstacle") {
  ProblemSpec spec;
  spec.grid = build_grid(2, 1.0, 4, 32);
  spec.coeffs = CoefficientField::from_matrices(
      spec.grid, constant_matrix(spec.grid, {1.0, 0.2, 0.0, 1.0}),
      constant_matrix(spec.grid, {1.0, 0.0, 0.0, 1.0}));
  spec.s = 0.7;
  spec.nu = 1e-2;
  spec.epsilon = 1e-2;
  spec.T = 0.3;
  spec.steps = 15;
  spec.graph = MonotoneGraph::lower();
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.4;
  b.amplitude = 0.05;
  spec.w0 = evaluate_profile(b, spec.grid);
  b.amplitude = -1.0;
  spec.w1 = evaluate_profile(b, spec.grid);
  spec.g = Field::scalar(spec.grid);
  const Trajectory traj = run(spec);
  REQUIRE(traj.steps() == 15);
  double min_u = 0.0;
  for (int j = 0; j <= traj.steps(); ++j)
    for (double u : traj.u_interior(j)) {
      CHECK(std::isfinite(u));
      min_u = std::min(min_u, u);
    }
  CHECK(min_u < 0.0);
  CHECK(min_u > -0.1);
}

TEST_CASE("time-dependent forcing") {
  ProblemSpec spec = small_string(MonotoneGraph::free());
  spec.w0 = Field::scalar(spec.grid);
  spec.w1 = Field::scalar(spec.grid);
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.3;
  const Field shape = evaluate_profile(b, spec.grid);
  spec.forcing = [&](double t) {
    Field f = shape;
    for (double& x : f.values) x *= t;
    return f;
  };
  const Trajectory traj = run(spec);
  CHECK(max_abs(traj.forcing(0).values) == 0.0);
  CHECK(max_abs_diff(traj.forcing(traj.steps()).values, spec.forcing(spec.T).values) == 0.0);
  CHECK(max_abs(traj.u_interior(traj.steps())) > 0.0);
}

TEST_CASE("interpolants") {
  const Trajectory traj = run(small_string(MonotoneGraph::lower()));
  const double h = traj.h();
  for (int j : {0, 1, 7, traj.steps()}) {
    const Interpolants at = interpolants(traj, j * h);
    CHECK(max_abs_diff(at.u_pc.values, traj.u(j).values) == 0.0);
    CHECK(max_abs_diff(at.U_affine.values, traj.u(j).values) <= 1e-15);
  }
  const Interpolants mid = interpolants(traj, 6.5 * h);
  CHECK(max_abs_diff(mid.u_pc.values, traj.u(7).values) == 0.0);
  CHECK(max_abs_diff(mid.v_pc.values, traj.v(7).values) == 0.0);
  std::vector<double> avg(traj.spec().grid.points()), vavg(avg.size());
  const Field u6 = traj.u(6), u7 = traj.u(7), v6 = traj.v(6), v7 = traj.v(7);
  for (std::size_t i = 0; i < avg.size(); ++i) {
    avg[i] = 0.5 * (u6.values[i] + u7.values[i]);
    vavg[i] = 0.5 * (v6.values[i] + v7.values[i]);
  }
  CHECK(max_abs_diff(mid.U_affine.values, avg) <= 1e-14);
  CHECK(max_abs_diff(mid.V_affine.values, vavg) <= 1e-12);
  CHECK_THROWS_AS(interpolants(traj, -0.1), DomainError);
  CHECK_THROWS_AS(interpolants(traj, traj.spec().T * 1.01), DomainError);
  CHECK_THROWS_AS(traj.a(0), DomainError);
}

TEST_CASE("data far above the obstacle evolves freely on a short horizon") {
  ScenarioParams p;
  p.N = 128;
  p.steps = 20;
  p.T = 0.05;
  ProblemSpec lifted = bouncing_string(p);
  for (std::size_t i : lifted.grid.interior_indices()) lifted.w0.values[i] += 10.0;
  ProblemSpec free = lifted;
  free.graph = MonotoneGraph::free();
  const Trajectory a = run(lifted), b = run(free);
  double lowest = 1e300;
  for (int j = 0; j <= a.steps(); ++j) {
    CHECK(max_abs_diff(a.u_interior(j), b.u_interior(j)) <= 1e-10);
    CHECK(max_abs(a.force_interior(j)) == 0.0);
    for (double x : b.u_interior(j)) lowest = std::min(lowest, x);
  }
  CHECK(lowest > 0.0);
}

TEST_CASE("time refinement converges at first order") {
  auto final_u = [](int steps) {
    ScenarioParams p;
    p.N = 128;
    p.steps = steps;
    p.T = 0.5;
    const Trajectory t = run(free_wave(p));
    const auto u = t.u_interior(steps);
    return std::vector<double>(u.begin(), u.end());
  };
  const auto u40 = final_u(40), u80 = final_u(80), u160 = final_u(160);
  const double d1 = max_abs_diff(u40, u80), d2 = max_abs_diff(u80, u160);
  CHECK(d1 / d2 >= 1.5);
  CHECK(d1 / d2 <= 3.0);
}

TEST_CASE("affine and piecewise-constant interpolants differ by at most h max |v|") {
  const Trajectory traj = run(small_string(MonotoneGraph::lower()));
  double vmax = 0.0;
  for (int j = 0; j <= traj.steps(); ++j) vmax = std::max(vmax, max_abs(traj.v_interior(j)));
  for (double frac : {0.1, 0.5, 0.9}) {
    for (int j : {1, 10, traj.steps()}) {
      const Interpolants at = interpolants(traj, (j - 1 + frac) * traj.h());
      CHECK(max_abs_diff(at.U_affine.values, at.u_pc.values) <= traj.h() * vmax * (1 + 1e-12));
    }
  }
}
