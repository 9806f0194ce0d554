#include "fracwave/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "fracwave/diagnostics.hpp"
#include "fracwave/frac_ops.hpp"
#include "fracwave/harness.hpp"
#include "fracwave/monotone.hpp"
#include "fracwave/profiles.hpp"
#include "fracwave/scenarios.hpp"
#include "fracwave/test_library.hpp"

namespace fracwave {

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string fixed(double x, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Interior-node relative L2 difference ||a - b|| / ||b||.
double relative_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t idx : a.grid.interior_indices()) {
    const double d = a.values[idx] - b.values[idx];
    num += d * d;
    den += b.values[idx] * b.values[idx];
  }
  return std::sqrt(num / den);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 0; k + 1 < v.size(); ++k)
    if (!(v[k + 1] < v[k])) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + sci(v[k]);
  return out;
}

// Free-wave calibration of the very weak tolerance slope C1 at n = 500.
double frozen_c1(std::uint64_t seed) {
  ScenarioParams p;
  p.steps = 500;
  return calibrate_tolerance(free_wave(p), 50, seed);
}

Outcome duality(const AcceptanceOptions& opt) {
  double worst = 0.0;
  int pairs = 0;
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    for (int d : {1, 2}) {
      const GridSpec g = build_grid(d, 1.0, 8, 256);
      const RieszOperator R(g, s);
      for (int k = 0; k < 25; ++k, ++pairs) {
        const std::uint64_t seed = opt.seed + std::uint64_t(1000 * pairs);
        const Field u = random_field(g, 1, seed, true);
        const Field phi = random_field(g, d, seed + 1, false);
        const double lhs = inner(R.gradient(u), phi) + inner(u, R.divergence(phi));
        worst = std::max(worst, std::abs(lhs) / (l2_norm(u) * l2_norm(phi)));
      }
    }
  }
  return {worst <= 1e-12, std::to_string(pairs) + " pairs, max |<D^s u,phi> + <u,D^s.phi>| / (|u||phi|) = " +
                              sci(worst) + " (limit 1e-12)"};
}

Outcome oracle(const AcceptanceOptions&) {
  const GridSpec g = build_grid(1, 1.0, 8, 1024);
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.25;
  const Field u = evaluate_profile(b, g);
  const auto coeffs = CoefficientField::identity(g);
  std::vector<double> diffs;
  for (double s : {0.3, 0.5, 0.7}) {
    const RieszOperator R(g, s);
    const Field spectral = apply_elliptic(make_operator_A(R, coeffs), u);
    const Field direct = singular_integral_laplacian(u, s, 2.0 * g.dx);
    diffs.push_back(relative_l2(spectral, direct));
  }
  const double worst = *std::max_element(diffs.begin(), diffs.end());
  return {worst <= 1e-2, "relative L2 differences at s = 0.3, 0.5, 0.7: " + list(diffs) +
                             " (limit 1e-2)"};
}

Outcome operator_limit(const AcceptanceOptions&) {
  const GridSpec g = build_grid(1, 10.0, 8, 1024);
  ProfileSpec p;
  p.type = "gaussian";
  p.width = 0.1;
  const auto probe = gradient_limit_probe(evaluate_profile(p, g), {0.9, 0.99, 0.999});
  const double final_rel = probe.errors.back() / probe.reference;
  const bool dec = strictly_decreasing(probe.errors);
  return {dec && final_rel <= 1e-3, "errors at s = 0.9, 0.99, 0.999: " + list(probe.errors) +
                                        (dec ? " (decreasing)" : " (not decreasing)") +
                                        ", final / |Du| = " + sci(final_rel) + " (limit 1e-3)"};
}

Outcome yosida_laws(const AcceptanceOptions& opt) {
  struct Case {
    std::string name;
    MonotoneGraph g;
    std::vector<double> kinks;  // breakpoints of beta
  };
  const std::vector<Case> cases{
      {"[0,inf)", MonotoneGraph::lower(0.0), {0.0}},
      {"[-1,1]", MonotoneGraph::indicator(-1.0, 1.0), {-1.0, 1.0}},
      {"staircase",
       MonotoneGraph::staircase({{-1.0, -1.0, -0.5}, {0.0, 0.0, 0.0}, {1.0, 0.5, 1.0}}, 0.5, 2.0),
       {-1.0, 0.0, 1.0}}};
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::vector<std::string> failures;
  double worst_fd = 0.0;
  const int samples = 10000;
  const double delta = 1e-5;
  for (const auto& c : cases) {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const std::string tag = c.name + " eps=" + sci(eps);
      if (c.g.yosida(0.0, eps) != 0.0) failures.push_back(tag + ": beta_eps(0) != 0");
      std::vector<double> r(samples);
      for (double& x : r) x = unif(rng);
      std::sort(r.begin(), r.end());
      std::vector<double> be(samples);
      c.g.yosida(r, eps, be);
      bool mono = true, lip = true, growth = true;
      for (int k = 0; k < samples; ++k) {
        if (std::abs(be[k]) > std::abs(r[k]) / eps) growth = false;
        if (k > 0) {
          if (be[k] < be[k - 1]) mono = false;
          if (std::abs(be[k] - be[k - 1]) > (r[k] - r[k - 1]) / eps * (1.0 + 1e-12) + 1e-12)
            lip = false;
        }
        // Kinks of beta_eps sit at x + eps * beta(x) for breakpoints x.
        bool near_kink = false;
        for (double x : c.kinks) {
          const auto v = c.g.values(x);
          const double lo = x + eps * (std::isfinite(v.first) ? v.first : 0.0);
          const double hi = x + eps * (std::isfinite(v.second) ? v.second : 0.0);
          if (r[k] > lo - 2 * delta && r[k] < hi + 2 * delta) near_kink = true;
        }
        if (!near_kink) {
          const double fd =
              (c.g.envelope(r[k] + delta, eps) - c.g.envelope(r[k] - delta, eps)) / (2 * delta);
          const double err = std::abs(fd - be[k]) / std::max(1.0, std::abs(be[k]));
          worst_fd = std::max(worst_fd, err);
        }
      }
      if (!mono) failures.push_back(tag + ": not monotone");
      if (!lip) failures.push_back(tag + ": not 1/eps-Lipschitz");
      if (!growth) failures.push_back(tag + ": |beta_eps(r)| > |r|/eps");
    }
  }
  if (worst_fd > 1e-6) failures.push_back("envelope derivative mismatch " + sci(worst_fd));
  std::string detail = "3 graphs x 3 eps x 1e4 samples; max envelope derivative error " +
                       sci(worst_fd) + " (limit 1e-6)";
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

Outcome scalar_mode(const AcceptanceOptions&) {
  ScenarioParams p;
  p.N = 64;
  p.T = 1.0;
  p.steps = 1000;
  p.s = 0.75;
  p.nu = 1e-2;
  const int k = 1;
  const ProblemSpec spec = torus_mode(p, k);
  const Trajectory traj = run(spec);
  // Independent recursion for the coefficient of sin(2 pi k x).
  const double lam = std::pow(2.0 * M_PI * k / spec.grid.box(), 2.0 * spec.s);
  const double h = spec.h();
  // c[j + 1] multiplies the mode in u_j; u_{-1} = w0 - h w1.
  std::vector<double> c(std::size_t(spec.steps) + 2);
  c[0] = 1.0 - 0.5 * h;
  c[1] = 1.0;
  const double lhs = 1.0 / (h * h) + lam + spec.nu * lam / h;
  for (int j = 1; j <= spec.steps; ++j) {
    const double rhs = (2.0 / (h * h) + spec.nu * lam / h) * c[std::size_t(j)] -
                       c[std::size_t(j) - 1] / (h * h);
    c[std::size_t(j) + 1] = rhs / lhs;
  }
  std::vector<double> mode(std::size_t(spec.grid.N));
  for (int i = 0; i < spec.grid.N; ++i)
    mode[std::size_t(i)] = std::sin(2.0 * M_PI * k * spec.grid.coord(i) / spec.grid.box());
  double err = 0.0, scale = 0.0;
  for (int j = 0; j <= spec.steps; ++j) {
    const auto u = traj.u_interior(j);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double ref = c[std::size_t(j) + 1] * mode[i];
      err = std::max(err, std::abs(u[i] - ref));
      scale = std::max(scale, std::abs(ref));
    }
  }
  const double rel = err / scale;
  return {rel <= 1e-10, "torus mode k = 1, n = 1000: max |u_j - c_j sin| / max |c_j sin| = " +
                            sci(rel) + " (limit 1e-10)"};
}

Outcome energy_identity(const AcceptanceOptions&) {
  std::string detail;
  bool ok = true;
  for (bool obstacle : {false, true}) {
    double res[2];
    double h[2];
    int i = 0;
    for (int n : {500, 1000}) {
      ScenarioParams p;
      p.steps = n;
      const ProblemSpec spec = obstacle ? bouncing_string(p) : free_wave(p);
      res[i] = energy_ledger(run(spec)).max_abs_residual();
      h[i++] = spec.h();
    }
    const double ratio = res[0] / res[1];
    const bool pass = ratio >= 1.5 && ratio <= 3.0;
    ok = ok && pass;
    detail += std::string(detail.empty() ? "" : "; ") + (obstacle ? "obstacle" : "free") +
              ": residual " + sci(res[0]) + " -> " + sci(res[1]) + ", C = " + fixed(res[1] / h[1]) +
              ", ratio " + fixed(ratio) + (pass ? "" : " (outside [1.5, 3])");
  }
  return {ok, detail};
}

struct FamilyRun {
  double epsilon, nu;
  Trajectory traj;
};

// The epsilon x nu bouncing-string family shared by criteria 7 and 8.
std::vector<FamilyRun>& family(int threads) {
  static std::vector<FamilyRun> runs;
  if (!runs.empty()) return runs;
  std::vector<std::pair<double, double>> grid;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4})
    for (double nu : {1e-1, 1e-2, 1e-3}) grid.push_back({eps, nu});
  std::vector<std::optional<Trajectory>> out(grid.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < int(grid.size()); k = next++) {
      ScenarioParams p;
      p.epsilon = grid[std::size_t(k)].first;
      p.nu = grid[std::size_t(k)].second;
      out[std::size_t(k)].emplace(run(bouncing_string(p)));
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < std::min<int>(threads, int(grid.size())); ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < grid.size(); ++k)
    runs.push_back({grid[k].first, grid[k].second, std::move(*out[k])});
  return runs;
}

Outcome apriori_bound(const AcceptanceOptions& opt) {
  auto& runs = family(opt.threads);
  std::vector<AprioriRow> rows;
  for (const auto& r : runs)
    rows.push_back(apriori_row(r.traj, "eps=" + sci(r.epsilon) + " nu=" + sci(r.nu)));
  const AprioriTable t = apriori_table(rows);
  double lo = rows.front().bound, hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.bound);
    hi = std::max(hi, r.bound);
  }
  return {t.spread <= 0.10, "12 runs, bound in [" + fixed(lo, 4) + ", " + fixed(hi, 4) +
                                "], spread " + fixed(100.0 * t.spread, 2) + "% (limit 10%)"};
}

Outcome penalty_bv(const AcceptanceOptions& opt) {
  auto& runs = family(opt.threads);
  const Field phi = [&] {
    SpatialBump b;
    const GridSpec& g = runs.front().traj.spec().grid;
    b.center = {0.5 * g.L};
    b.radius = 0.25 * g.L;
    return bump_field(g, b);
  }();
  std::vector<double> pm, tv;
  for (const auto& r : runs) {
    pm.push_back(penalty_mass(r.traj));
    tv.push_back(bv_functional(r.traj, phi).total_variation);
  }
  const auto band = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  const double bp = band(pm), bt = band(tv);
  return {bp <= 2.0 && bt <= 2.0, "max/min over 12 runs: penalty mass " + fixed(bp) +
                                      ", BV variation " + fixed(bt) + " (band limit 2)"};
}

Outcome violation_decay(const AcceptanceOptions& opt) {
  SweepPlan plan;
  plan.base = bouncing_string(ScenarioParams{});
  plan.axis = SweepAxis::Epsilon;
  plan.values = {1e-1, 1e-2, 1e-3, 1e-4};
  plan.test_count = 0;
  plan.threads = opt.threads;
  plan.seed = opt.seed;
  const SweepReport r = sweep_epsilon(plan);
  std::vector<double> v;
  for (const auto& m : r.members) v.push_back(m.violation_l2);
  const bool dec = strictly_decreasing(v);
  const double ratio = v.back() / v.front();
  return {dec && ratio <= 1e-2, "L2(Q_T) violation " + list(v) +
                                    (dec ? " (decreasing)" : " (not decreasing)") +
                                    ", final / initial = " + sci(ratio) + " (limit 1e-2)"};
}

Outcome very_weak(const AcceptanceOptions& opt) {
  const double c1 = frozen_c1(opt.seed);
  ScenarioParams fine;
  const ProblemSpec free_spec = free_wave(fine);
  const auto tests = build_test_library(free_spec.grid, free_spec.T, 50, opt.seed);
  // Free wave at h/2 must be two-sided O(h).
  double free_max = 0.0;
  for (const auto& t : very_weak_terms(run(free_spec), tests))
    free_max = std::max(free_max, std::abs(t.residual(free_spec.nu)));
  const double tol_free = c1 * free_spec.h();
  // C1 h at the fine step equals max |R| at the calibration step.
  const double free_ratio = tol_free / free_max;
  const bool free_ok = free_max <= tol_free && free_ratio >= 1.5 && free_ratio <= 3.0;
  std::string detail = "C1 = " + sci(c1) + ", C2 = 0; free wave max |R| = " + sci(free_max) +
                       " <= C1 h = " + sci(tol_free) + ", refinement ratio " + fixed(free_ratio);
  bool ok = free_ok;
  std::vector<double> mins;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    ScenarioParams p;
    p.epsilon = eps;
    const ProblemSpec spec = bouncing_string(p);
    const auto rep = very_weak_residual(run(spec), tests, spec.nu, c1 * spec.h());
    mins.push_back(rep.min_value);
    ok = ok && rep.pass;
  }
  detail += "; obstacle min residual over eps = 1e-1..1e-4: " + list(mins) + " (>= -" +
            sci(c1 * free_spec.h()) + ")";
  return {ok, detail};
}

Outcome viscosity_limit(const AcceptanceOptions& opt) {
  ScenarioParams p;
  p.epsilon = 1e-4;
  SweepPlan plan;
  plan.base = bouncing_string(p);
  plan.axis = SweepAxis::Viscosity;
  plan.values = {1e-1, 1e-2, 1e-3};
  plan.seed = opt.seed;
  plan.threads = opt.threads;
  const SweepReport r = sweep_viscosity(plan);
  std::vector<double> pairing;
  for (const auto& m : r.members) pairing.push_back(m.viscous_pairing);
  return {r.cauchy_decreasing && r.envelope_ok,
          "Cauchy L2(Q_T) " + list(r.cauchy_QT) +
              (r.cauchy_decreasing ? " (decreasing)" : " (not decreasing)") +
              "; viscous pairing " + list(pairing) + " vs 2 sqrt(nu) C, C = " + sci(r.envelope_C) +
              (r.envelope_ok ? " (within)" : " (exceeded)")};
}

Outcome exponent_limit(const AcceptanceOptions& opt) {
  const double c1 = frozen_c1(opt.seed);
  std::string detail;
  bool ok = true;
  for (bool obstacle : {false, true}) {
    ScenarioParams p;
    p.epsilon = 1e-4;
    p.nu = 1e-3;
    SweepPlan plan;
    plan.base = obstacle ? bouncing_string(p) : free_wave(p);
    plan.axis = SweepAxis::ExponentS;
    plan.values = {0.6, 0.8, 0.9, 0.99};
    plan.seed = opt.seed;
    plan.threads = opt.threads;
    plan.tol_c1 = c1;
    plan.test_count = obstacle ? 50 : 0;
    const SweepReport r = sweep_exponent(plan);
    std::vector<double> d;
    for (const auto& m : r.members) d.push_back(m.reference_QT);
    ok = ok && r.reference_decreasing;
    detail += std::string(detail.empty() ? "" : "; ") + (obstacle ? "obstacle" : "free") +
              " |u_s - u_1| " + list(d) +
              (r.reference_decreasing ? " (decreasing)" : " (not decreasing)");
    if (obstacle) {
      const SweepMember& ref = *r.reference;
      const bool vw = ref.vw_pass;
      ok = ok && vw;
      detail += ", s = 1 very weak min " + sci(ref.vw_min) + " >= -" + sci(ref.vw_tolerance) +
                (vw ? "" : " FAILED");
    }
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double limit;
  std::function<Outcome(const AcceptanceOptions&)> body;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "duality", 5.0, duality},
      {2, "oracle equivalence", 60.0, oracle},
      {3, "s->1 operator limit", 5.0, operator_limit},
      {4, "Yosida laws", 5.0, yosida_laws},
      {5, "scalar-mode oracle", 10.0, scalar_mode},
      {6, "energy identity", 30.0, energy_identity},
      {7, "uniform a-priori bound", 180.0, apriori_bound},
      {8, "penalty mass and BV bounds", 180.0, penalty_bv},
      {9, "constraint violation decay", 120.0, violation_decay},
      {10, "very weak residual", 60.0, very_weak},
      {11, "nu->0 limit", 120.0, viscosity_limit},
      {12, "s->1 solutions", 180.0, exponent_limit},
  };
  return all;
}

}  // namespace

int acceptance_count() { return int(criteria().size()); }

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* live) {
  std::vector<CriterionResult> out;
  // Criterion 8 reuses the family computed by criterion 7; its runtime is
  // charged to the same budget.
  double family_seconds = 0.0;
  for (const auto& c : criteria()) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), c.id) == opt.only.end())
      continue;
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.limit_seconds = c.limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = c.body(opt);
      r.metric_pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.metric_pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.id == 7) family_seconds = r.seconds;
    if (c.id == 8) r.seconds += family_seconds;
    if (live) *live << format_result(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass() ? "PASS" : "FAIL") << " [" << (r.id < 10 ? " " : "") << r.id << "] " << r.name
     << ": " << r.detail << " (" << fixed(r.seconds, 2) << " s, limit " << fixed(r.limit_seconds, 0)
     << " s)";
  if (r.metric_pass && !r.pass()) os << " runtime budget exceeded";
  return os.str();
}

}  // namespace fracwave
