#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fracwave/diagnostics.hpp"
#include "fracwave/profiles.hpp"
#include "fracwave/scenarios.hpp"

using namespace fracwave;

namespace {

Trajectory string_run(const MonotoneGraph& graph, int steps, double T = 0.5, int N = 128) {
  ScenarioParams p;
  p.N = N;
  p.steps = steps;
  p.T = T;
  ProblemSpec spec = bouncing_string(p);
  spec.graph = graph;
  return run(spec);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("time profiles") {
  for (const TimeProfile eta : standard_time_profiles(2.0)) {
    CAPTURE(eta.tau);
    CAPTURE(eta.power);
    CHECK(eta(0.0) == 1.0);
    CHECK(eta(eta.tau) == 0.0);
    CHECK(eta(2.0) == 0.0);
    CHECK(eta.integral(0.1, 0.7) ==
          doctest::Approx(simpson([&](double t) { return eta(t); }, 0.1, 0.7)).epsilon(1e-10));
    CHECK(eta.l2_squared() ==
          doctest::Approx(simpson([&](double t) { return eta(t) * eta(t); }, 0.0, eta.tau)).epsilon(1e-10));
    if (eta.power > 1)
      CHECK(eta.derivative_l2_squared() ==
            doctest::Approx(simpson([&](double t) { return std::pow(eta.derivative(t), 2); }, 0.0,
                                    eta.tau))
                .epsilon(1e-8));
    const double t = 0.3 * eta.tau, d = 1e-6;
    CHECK(eta.derivative(t) == doctest::Approx((eta(t + d) - eta(t - d)) / (2 * d)).epsilon(1e-7));
  }
}

TEST_CASE("test library") {
  const GridSpec g = build_grid(1, 10.0, 8, 512);
  const auto lib = build_test_library(g, 2.0, 50, 9);
  REQUIRE(lib.size() == 50);
  CHECK(lib[0].label == "eta0_psi0");
  CHECK(lib[17].label == "eta1_psi2");
  for (const auto& f : lib) CHECK_NOTHROW(check_test_function(f, 2.0));
  CHECK(build_test_library(g, 2.0, 50, 9)[33].psi.values == lib[33].psi.values);
  CHECK(build_test_library(g, 2.0, 50, 10)[33].psi.values != lib[33].psi.values);

  TestFunction bad = lib[0];
  bad.eta.tau = 3.0;
  CHECK_THROWS_AS(check_test_function(bad, 2.0), DomainError);
  bad = lib[0];
  bad.psi.values[bad.psi.grid.interior_indices()[10]] = -1.0;
  CHECK_THROWS_AS(check_test_function(bad, 2.0), DomainError);
  bad = lib[0];
  bad.psi.values[0] = 1.0;
  CHECK_THROWS_AS(check_test_function(bad, 2.0), DomainError);
}

TEST_CASE("energy of a torus mode at t = 0") {
  ScenarioParams p;
  p.N = 64;
  p.steps = 50;
  p.T = 0.5;
  p.s = 0.7;
  const int k = 3;
  ProblemSpec spec = torus_mode(p, k);
  const auto rep = energy_ledger(run(spec));
  REQUIRE(rep.rows.size() == 51);
  // |sin(2 pi k x)|^2 integrates to 1/2 on the unit torus.
  CHECK(rep.rows[0].kinetic == doctest::Approx(0.5 * 0.25 * 0.5));
  CHECK(rep.rows[0].elastic == doctest::Approx(0.5 * std::pow(2 * M_PI * k, 1.4) * 0.5));
  CHECK(rep.rows[0].penalty == 0.0);
  CHECK(rep.rows[0].residual == 0.0);
  // Backward differences dissipate: the ledger residual never grows positive.
  for (const auto& r : rep.rows) CHECK(r.residual <= 1e-10);
  CHECK(rep.rows.back().dissipation > 0.0);
  CHECK(rep.max_residual() <= 1e-10);
  CHECK(rep.max_abs_residual() == doctest::Approx(std::abs(
                                      std::min_element(rep.rows.begin(), rep.rows.end(),
                                                       [](auto& a, auto& b) { return a.residual < b.residual; })
                                          ->residual)));
}

TEST_CASE("energy residual of the obstacle run shrinks with h") {
  const auto r1 = energy_ledger(string_run(MonotoneGraph::lower(), 50));
  const auto r2 = energy_ledger(string_run(MonotoneGraph::lower(), 200));
  for (const auto& r : r2.rows) CHECK(r.residual <= 1e-10);
  CHECK(r2.max_abs_residual() < r1.max_abs_residual());
  CHECK(r2.rows.back().penalty >= 0.0);
}

TEST_CASE("a-priori table") {
  std::vector<AprioriRow> rows(3);
  rows[0].bound = 1.0;
  rows[1].bound = 1.05;
  rows[2].bound = 1.2;
  const auto t = apriori_table(rows);
  CHECK(t.spread == doctest::Approx(0.2));
  CHECK(t.flagged);
  rows.pop_back();
  CHECK(apriori_table(rows).spread == doctest::Approx(0.05));
  CHECK_FALSE(apriori_table(rows).flagged);
  CHECK_THROWS_AS(apriori_table({}), DomainError);

  const Trajectory traj = string_run(MonotoneGraph::lower(), 40);
  const AprioriRow row = apriori_row(traj, "x");
  CHECK(row.bound == doctest::Approx(row.sup_energy + row.dissipation + row.penalty_T));
  CHECK(row.sup_energy > 0.0);
  const auto one = apriori_check({&traj}, {"only"});
  CHECK(one.rows[0].label == "only");
  CHECK(one.spread == 0.0);
}

TEST_CASE("penalty mass and BV functional") {
  const Trajectory free = string_run(MonotoneGraph::free(), 40);
  CHECK(penalty_mass(free) == 0.0);
  const Trajectory obst = string_run(MonotoneGraph::lower(), 40);
  double mass = 0.0;
  for (int j = 1; j <= obst.steps(); ++j)
    for (double f : obst.force_interior(j)) mass += std::abs(f);
  mass *= obst.h() * obst.spec().grid.dx;
  CHECK(penalty_mass(obst) == doctest::Approx(mass).epsilon(1e-12));

  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.25;
  const Field phi = evaluate_profile(b, obst.spec().grid);
  const BvResult bv = bv_functional(obst, phi);
  REQUIRE(bv.values.size() == std::size_t(obst.steps()) + 1);
  double tv = 0.0;
  for (int j = 0; j <= obst.steps(); ++j) {
    CHECK(bv.values[std::size_t(j)] == doctest::Approx(inner(obst.v(j), phi)).epsilon(1e-12));
    if (j > 0) tv += std::abs(bv.values[std::size_t(j)] - bv.values[std::size_t(j - 1)]);
  }
  CHECK(bv.total_variation == doctest::Approx(tv));
  Field neg = phi;
  for (double& x : neg.values) x = -x;
  CHECK_THROWS_WITH_AS(bv_functional(obst, neg), "test function has negative nodes", DomainError);
}

TEST_CASE("right limit of the velocity without contact") {
  const Trajectory traj = string_run(MonotoneGraph::free(), 400, 0.5, 128);
  const Field v0 = right_limit_velocity(traj);
  Field diff = v0;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= traj.spec().w1.values[i];
  CHECK(l2_norm(diff) <= 1e-2 * l2_norm(traj.spec().w1));
  CHECK_THROWS_AS(right_limit_velocity(string_run(MonotoneGraph::free(), 3)), DomainError);
}

TEST_CASE("very weak residual") {
  const GridSpec g = build_grid(1, 10.0, 8, 128);
  const auto lib = build_test_library(g, 0.5, 16, 4);

  ScenarioParams p;
  p.N = 128;
  p.steps = 40;
  p.T = 0.5;
  ProblemSpec zero = bouncing_string(p);
  zero.w0 = Field::scalar(zero.grid);
  zero.w1 = Field::scalar(zero.grid);
  const auto rz = very_weak_residual(run(zero), lib, zero.nu, 0.0);
  CHECK(rz.max_abs == 0.0);
  CHECK(rz.pass);

  // Free wave: the residual is a first-order quadrature defect.
  const auto r1 = very_weak_residual(string_run(MonotoneGraph::free(), 100), lib, p.nu, 1.0);
  const auto r2 = very_weak_residual(string_run(MonotoneGraph::free(), 200), lib, p.nu, 1.0);
  REQUIRE(r1.entries.size() == 16);
  CHECK(r2.max_abs < r1.max_abs);
  CHECK(r1.max_abs / r2.max_abs == doctest::Approx(2.0).epsilon(0.2));

  // Contact only pushes upward, so the obstacle residual is bounded below.
  const Trajectory obst = string_run(MonotoneGraph::lower(), 100);
  const auto terms = very_weak_terms(obst, lib);
  const auto fine = very_weak_terms(string_run(MonotoneGraph::lower(), 400), lib);
  const auto ro = very_weak_residual(obst, lib, p.nu, 1e-2);
  for (std::size_t k = 0; k < lib.size(); ++k) {
    CHECK(terms[k].penalty <= 1e-14);
    CHECK(ro.entries[k].value == doctest::Approx(terms[k].residual(p.nu)));
    // The penalised identity holds up to a quadrature defect that shrinks with h.
    CHECK(std::abs(fine[k].identity_residual(p.nu)) < std::abs(terms[k].identity_residual(p.nu)));
  }
  CHECK(ro.pass);
  CHECK(ro.min_value == doctest::Approx(std::min_element(ro.entries.begin(), ro.entries.end(),
                                                         [](auto& a, auto& b) { return a.value < b.value; })
                                            ->value));
}

TEST_CASE("initial condition residual") {
  const Trajectory traj = string_run(MonotoneGraph::lower(), 200);
  const auto rep = initial_condition_residual(traj, {traj.spec().w0});
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].label == "pairing:0");
  CHECK(rep.entries[0].value == 0.0);
  CHECK(rep.entries[1].label == "short_time:0");
  CHECK(rep.pass);

  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.3;
  b.amplitude = 0.5;
  const auto rep2 = initial_condition_residual(traj, {evaluate_profile(b, traj.spec().grid)});
  CHECK(rep2.pass);
  Field neg = traj.spec().w0;
  for (double& x : neg.values) x = -x - 1e-3 * (x != 0.0);
  CHECK_THROWS_AS(initial_condition_residual(traj, {neg}), DomainError);
}

TEST_CASE("penalty dual norm") {
  const GridSpec g = build_grid(1, 10.0, 8, 128);
  const auto lib = build_test_library(g, 0.5, 16, 4);
  CHECK(penalty_dual_norm(string_run(MonotoneGraph::free(), 40), lib) == 0.0);
  CHECK(penalty_dual_norm(string_run(MonotoneGraph::lower(), 40), lib) > 0.0);
}

TEST_CASE("constraint violation") {
  const Trajectory traj = string_run(MonotoneGraph::lower(), 60);
  double linf = 0.0, l2 = 0.0;
  for (int j = 0; j <= traj.steps(); ++j)
    for (double u : traj.u_interior(j)) {
      linf = std::max(linf, -std::min(u, 0.0));
      if (j > 0) l2 += std::pow(std::min(u, 0.0), 2) * traj.h() * traj.spec().grid.dx;
    }
  const auto cv = constraint_violation(traj);
  CHECK(cv.linf > 0.0);
  CHECK(cv.linf == linf);
  CHECK(cv.l2_QT == doctest::Approx(std::sqrt(l2)));

  const Trajectory free = string_run(MonotoneGraph::free(), 60);
  CHECK(constraint_violation(free).linf == 0.0);
  const Trajectory stair = string_run(
      MonotoneGraph::staircase({{0.0, 0.0, 0.0}}, 0.0, 1.0), 10);
  CHECK_THROWS_AS(constraint_violation(stair), DomainError);
}

TEST_CASE("variational inequality residuals") {
  const Trajectory traj = string_run(MonotoneGraph::lower(), 100);
  CHECK(variational_inequality_self(traj) == 0.0);
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.3;
  const Field bump = evaluate_profile(b, traj.spec().grid);
  for (const auto& eta : standard_time_profiles(traj.spec().T))
    CHECK(variational_inequality_residual(traj, bump, eta) >= -1e-8);
  Field neg = bump;
  for (double& x : neg.values) x = -x;
  CHECK_THROWS_AS(variational_inequality_residual(traj, neg, {0.5, 1}), DomainError);
}

TEST_CASE("trajectory distances") {
  const Trajectory a = string_run(MonotoneGraph::lower(), 40);
  const Trajectory b = string_run(MonotoneGraph::free(), 40);
  CHECK(distance_QT(a, a) == 0.0);
  CHECK(distance_T(a, a) == 0.0);
  double sQT = 0.0, sT = 0.0, nQT = 0.0;
  const double dx = a.spec().grid.dx;
  for (int j = 1; j <= a.steps(); ++j) {
    const auto ua = a.u_interior(j), ub = b.u_interior(j);
    for (std::size_t i = 0; i < ua.size(); ++i) {
      sQT += std::pow(ua[i] - ub[i], 2) * a.h() * dx;
      nQT += ua[i] * ua[i] * a.h() * dx;
      if (j == a.steps()) sT += std::pow(ua[i] - ub[i], 2) * dx;
    }
  }
  CHECK(distance_QT(a, b) == doctest::Approx(std::sqrt(sQT)));
  CHECK(distance_T(a, b) == doctest::Approx(std::sqrt(sT)));
  CHECK(norm_QT(a) == doctest::Approx(std::sqrt(nQT)));
  CHECK_THROWS_AS(distance_QT(a, string_run(MonotoneGraph::free(), 20)), DomainError);
}

TEST_CASE("inviscid free energy defect is first order") {
  auto defect = [](int steps) {
    ScenarioParams p;
    p.N = 32;
    p.steps = steps;
    p.T = 0.5;
    p.nu = 0.0;
    ProblemSpec spec = torus_mode(p, 1);
    spec.allow_inviscid = true;
    return std::abs(energy_ledger(run(spec)).final_residual());
  };
  const double e1 = defect(200), e2 = defect(400);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 >= 1.5);
  CHECK(e1 / e2 <= 3.0);
}

TEST_CASE("initial contact pairing") {
  ScenarioParams p;
  p.N = 128;
  p.steps = 400;
  p.T = 0.5;
  // The penalty must act within one step for the jump in velocity to show.
  p.epsilon = 1e-6;
  ProblemSpec spec = bouncing_string(p);
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.2;
  const Field bump = evaluate_profile(b, spec.grid);
  spec.w0 = Field::scalar(spec.grid);
  spec.w1 = bump;
  for (double& x : spec.w1.values) x = -x;
  const Trajectory traj = run(spec);
  Field wide = bump, narrow = bump;
  for (double& x : wide.values) x *= 2.0;
  b.radius = 0.05;
  narrow = evaluate_profile(b, spec.grid);
  const auto rep = initial_condition_residual(traj, {bump, wide, narrow});
  double best = -1e300;
  for (const auto& e : rep.entries) {
    if (e.label.rfind("pairing:", 0) != 0) continue;
    CAPTURE(e.label);
    CHECK(e.value >= -e.tolerance);
    best = std::max(best, e.value);
  }
  CHECK(best > 0.0);
}

TEST_CASE("total variation of the free velocity is stable under refinement") {
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.25;
  auto tv = [&](int steps) {
    const Trajectory t = string_run(MonotoneGraph::free(), steps);
    return bv_functional(t, evaluate_profile(b, t.spec().grid)).total_variation;
  };
  const double t1 = tv(100), t2 = tv(200), t3 = tv(400);
  CHECK(t2 == doctest::Approx(t1).epsilon(0.1));
  CHECK(t3 == doctest::Approx(t2).epsilon(0.05));
}
