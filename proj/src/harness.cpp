#include "fracwave/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "fracwave/test_library.hpp"

namespace fracwave {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Runs body(k) for k = 0..count-1 on up to `threads` workers; the first
// failure in index order is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        errors[std::size_t(k)] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min(threads, count));
  std::vector<std::thread> pool;
  for (int i = 1; i < t; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Field centre_bump(const GridSpec& g) {
  SpatialBump b;
  b.center.assign(std::size_t(g.d), 0.5 * g.L);
  b.radius = 0.25 * g.L;
  return bump_field(g, b);
}

ProblemSpec member_spec(const SweepPlan& plan, double value) {
  ProblemSpec spec = plan.base;
  switch (plan.axis) {
    case SweepAxis::Epsilon: spec.epsilon = value; break;
    case SweepAxis::Viscosity: spec.nu = value; break;
    case SweepAxis::ExponentS: spec.s = value; break;
    case SweepAxis::Timestep: spec.steps = int(std::lround(value)); break;
  }
  return spec;
}

struct MemberOptions {
  double tol_c1 = -1.0;
  double tol_c2 = 0.0;
  bool vi = false;
};

SweepMember evaluate_member(const Trajectory& traj, double value,
                            const std::vector<TestFunction>& tests, const MemberOptions& opt) {
  const ProblemSpec& p = traj.spec();
  SweepMember m;
  m.value = value;
  m.steps = traj.steps();
  m.h = traj.h();
  m.epsilon = p.epsilon;
  m.nu = p.nu;
  m.s = p.s;
  if (p.graph.is_indicator()) {
    const auto cv = constraint_violation(traj);
    m.violation_l2 = cv.l2_QT;
    m.violation_linf = cv.linf;
  }
  m.penalty_mass = penalty_mass(traj);
  m.bv_variation = bv_functional(traj, centre_bump(p.grid)).total_variation;
  m.apriori = apriori_row(traj, "");
  m.energy_residual = energy_ledger(traj).final_residual();
  if (!tests.empty()) {
    const auto terms = very_weak_terms(traj, tests);
    m.vw_min = m.vw_inviscid_min = std::numeric_limits<double>::infinity();
    m.vw_max = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
      m.vw_min = std::min(m.vw_min, t.residual(p.nu));
      m.vw_max = std::max(m.vw_max, t.residual(p.nu));
      m.vw_inviscid_min = std::min(m.vw_inviscid_min, t.residual(0.0));
      m.viscous_pairing = std::max(m.viscous_pairing, std::abs(p.nu * t.viscous));
      m.identity_max_abs = std::max(m.identity_max_abs, std::abs(t.identity_residual(p.nu)));
    }
    if (opt.tol_c1 >= 0.0) {
      m.vw_tolerance = opt.tol_c1 * m.h + opt.tol_c2 * p.epsilon;
      m.vw_pass = m.vw_min >= -m.vw_tolerance;
    }
  }
  if (opt.vi) {
    m.vi_residual = variational_inequality_residual(traj, centre_bump(p.grid), TimeProfile{p.T, 1});
    m.vi_self = variational_inequality_self(traj);
  }
  for (const auto& st : traj.stats) {
    m.newton_iters += st.newton_iters;
    m.krylov_iters += st.krylov_iters;
  }
  return m;
}

struct SweepRuns {
  std::vector<Trajectory> trajs;
  std::vector<SweepMember> members;
};

SweepRuns run_members(const std::vector<ProblemSpec>& specs, const std::vector<double>& values,
                      const std::vector<TestFunction>& tests, const MemberOptions& opt,
                      int threads, const std::string& axis) {
  const int count = int(specs.size());
  std::vector<std::optional<Trajectory>> trajs(specs.size());
  std::vector<SweepMember> members(specs.size());
  parallel_for(count, threads, [&](int k) {
    const std::size_t i = std::size_t(k);
    try {
      trajs[i].emplace(run(specs[i]));
    } catch (const std::exception& e) {
      throw SweepError("member " + axis + "=" + fmt(values[i]) + " failed: " + e.what());
    }
    members[i] = evaluate_member(*trajs[i], values[i], tests, opt);
    members[i].apriori.label = axis + "=" + fmt(values[i]);
  });
  SweepRuns out;
  for (auto& t : trajs) out.trajs.push_back(std::move(*t));
  out.members = std::move(members);
  return out;
}

std::vector<TestFunction> library_for(const SweepPlan& plan) {
  if (plan.test_count <= 0) return {};
  return build_test_library(plan.base.grid, plan.base.T, plan.test_count, plan.seed);
}

void fill_cauchy(SweepReport& rep, const SweepRuns& runs, const std::vector<double>& x,
                 double zero_gap) {
  for (std::size_t k = 0; k + 1 < runs.trajs.size(); ++k) {
    rep.cauchy_QT.push_back(distance_QT_any(runs.trajs[k], runs.trajs[k + 1]));
    rep.cauchy_T.push_back([&] {
      const auto ua = runs.trajs[k].u_interior(runs.trajs[k].steps());
      const auto ub = runs.trajs[k + 1].u_interior(runs.trajs[k + 1].steps());
      double s = 0.0;
      for (std::size_t i = 0; i < ua.size(); ++i) s += (ua[i] - ub[i]) * (ua[i] - ub[i]);
      return std::sqrt(s * runs.trajs[k].spec().grid.cell_volume());
    }());
  }
  for (std::size_t k = 0; k + 1 < rep.cauchy_QT.size(); ++k) {
    const double d0 = rep.cauchy_QT[k], d1 = rep.cauchy_QT[k + 1];
    const double r = (d0 > 0.0 && d1 > 0.0) ? std::log(d0 / d1) / std::log(x[k] / x[k + 1])
                                            : kNotApplicable;
    rep.rates.push_back(r);
  }
  rep.cauchy_decreasing = decreasing_sequence(rep.cauchy_QT, zero_gap);
  if (!rep.cauchy_decreasing) rep.notes.push_back("successive differences do not decrease");
}

void fill_apriori(SweepReport& rep) {
  std::vector<AprioriRow> rows;
  for (const auto& m : rep.members) rows.push_back(m.apriori);
  rep.apriori = apriori_table(std::move(rows));
  if (rep.apriori.flagged)
    rep.notes.push_back("a-priori bound spread " + fmt(rep.apriori.spread) + " above 10%");
}

void fill_vw(SweepReport& rep) {
  for (const auto& m : rep.members)
    if (!m.vw_pass) {
      rep.pass = false;
      rep.notes.push_back("very weak residual " + fmt(m.vw_min) + " below -" +
                          fmt(m.vw_tolerance) + " at value " + fmt(m.value));
    }
}

void require_axis(const SweepPlan& plan, SweepAxis axis) {
  if (plan.axis != axis)
    throw SweepError("plan axis is " + to_string(plan.axis) + ", expected " + to_string(axis));
  validate_plan(plan);
}

}  // namespace

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Epsilon: return "epsilon";
    case SweepAxis::Viscosity: return "viscosity";
    case SweepAxis::ExponentS: return "exponent_s";
    case SweepAxis::Timestep: return "timestep";
  }
  return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "epsilon") return SweepAxis::Epsilon;
  if (name == "viscosity") return SweepAxis::Viscosity;
  if (name == "exponent_s") return SweepAxis::ExponentS;
  if (name == "timestep") return SweepAxis::Timestep;
  throw SweepError("unknown sweep axis '" + name + "'");
}

void validate_plan(const SweepPlan& plan) {
  const auto& v = plan.values;
  if (v.empty()) throw SweepError("sweep values must be nonempty");
  bool inc = true, dec = true;
  for (std::size_t k = 1; k < v.size(); ++k) {
    inc = inc && v[k] > v[k - 1];
    dec = dec && v[k] < v[k - 1];
  }
  if (!inc && !dec) throw SweepError("sweep values must be strictly monotone");
  for (double x : v) {
    switch (plan.axis) {
      case SweepAxis::Epsilon:
        if (!(x > 0.0 && x < 1.0)) throw SweepError("epsilon must lie in (0,1)");
        break;
      case SweepAxis::Viscosity:
        if (!(x > 0.0) && !(x == 0.0 && plan.base.allow_inviscid))
          throw SweepError("viscosity values must be positive");
        break;
      case SweepAxis::ExponentS:
        if (!(x > 0.0 && x <= 1.0)) throw SweepError("exponent values must lie in (0,1]");
        if (v.size() > 1 && !inc) throw SweepError("exponent values must increase towards 1");
        break;
      case SweepAxis::Timestep:
        if (!(x >= 1.0) || x != std::floor(x)) throw SweepError("step counts must be positive integers");
        break;
    }
  }
  if (plan.threads < 1) throw SweepError("threads must be at least 1");
}

bool decreasing_sequence(const std::vector<double>& d, double zero_gap) {
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    if (std::isnan(d[k]) || std::isnan(d[k + 1])) return false;
    if (d[k + 1] <= zero_gap && d[k] <= zero_gap) continue;
    if (!(d[k + 1] < d[k])) return false;
  }
  return true;
}

double distance_QT_any(const Trajectory& a, const Trajectory& b) {
  require_same_grid(a.spec().grid, b.spec().grid);
  if (std::abs(a.spec().T - b.spec().T) > 1e-12 * a.spec().T)
    throw DomainError("trajectories must share the horizon");
  const Trajectory& c = a.steps() <= b.steps() ? a : b;  // coarse
  const Trajectory& f = a.steps() <= b.steps() ? b : a;
  if (f.steps() % c.steps() != 0) throw DomainError("step counts must divide one another");
  const int r = f.steps() / c.steps();
  double s = 0.0;
  for (int j = 1; j <= f.steps(); ++j) {
    const auto uf = f.u_interior(j);
    const auto uc = c.u_interior((j + r - 1) / r);
    for (std::size_t i = 0; i < uf.size(); ++i) s += (uf[i] - uc[i]) * (uf[i] - uc[i]);
  }
  return std::sqrt(s * a.spec().grid.cell_volume() * f.h());
}

SweepReport sweep_epsilon(const SweepPlan& plan) {
  require_axis(plan, SweepAxis::Epsilon);
  std::vector<ProblemSpec> specs;
  for (double v : plan.values) specs.push_back(member_spec(plan, v));
  const auto tests = library_for(plan);
  auto runs = run_members(specs, plan.values, tests, {plan.tol_c1, plan.tol_c2, false},
                          plan.threads, "epsilon");
  SweepReport rep;
  rep.axis = plan.axis;
  rep.members = runs.members;
  fill_cauchy(rep, runs, plan.values, plan.zero_gap);
  std::vector<double> viol;
  for (const auto& m : rep.members)
    if (!std::isnan(m.violation_l2)) viol.push_back(m.violation_l2);
  rep.violation_decreasing = decreasing_sequence(viol, plan.zero_gap);
  if (!rep.violation_decreasing) rep.notes.push_back("constraint violation does not decrease");
  fill_apriori(rep);
  rep.pass = rep.cauchy_decreasing && rep.violation_decreasing;
  fill_vw(rep);
  return rep;
}

SweepReport sweep_viscosity(const SweepPlan& plan) {
  require_axis(plan, SweepAxis::Viscosity);
  std::vector<ProblemSpec> specs;
  for (double v : plan.values) specs.push_back(member_spec(plan, v));
  const auto tests = library_for(plan);
  auto runs = run_members(specs, plan.values, tests, {plan.tol_c1, plan.tol_c2, false},
                          plan.threads, "viscosity");
  SweepReport rep;
  rep.axis = plan.axis;
  rep.members = runs.members;
  fill_cauchy(rep, runs, plan.values, plan.zero_gap);
  const auto top = std::max_element(rep.members.begin(), rep.members.end(),
                                    [](const auto& x, const auto& y) { return x.nu < y.nu; });
  rep.envelope_C = top->nu > 0.0 ? top->viscous_pairing / std::sqrt(top->nu) : 0.0;
  for (const auto& m : rep.members) {
    const double env = 2.0 * std::sqrt(m.nu) * rep.envelope_C;
    if (m.viscous_pairing > env * (1.0 + 1e-12) + 1e-300) {
      rep.envelope_ok = false;
      rep.notes.push_back("viscous pairing " + fmt(m.viscous_pairing) + " exceeds 2 sqrt(nu) C = " +
                          fmt(env) + " at nu = " + fmt(m.nu));
    }
  }
  fill_apriori(rep);
  rep.pass = rep.cauchy_decreasing && rep.envelope_ok;
  fill_vw(rep);
  return rep;
}

SweepReport sweep_exponent(const SweepPlan& plan) {
  require_axis(plan, SweepAxis::ExponentS);
  std::vector<double> values = plan.values;
  const bool has_one = values.back() == 1.0;
  if (!has_one) values.push_back(1.0);
  std::vector<ProblemSpec> specs;
  for (double v : values) specs.push_back(member_spec(plan, v));
  const auto tests = library_for(plan);
  auto runs = run_members(specs, values, tests, {plan.tol_c1, plan.tol_c2, false}, plan.threads,
                          "s");
  SweepReport rep;
  rep.axis = plan.axis;
  rep.sigma = values.front();
  const Trajectory& ref = runs.trajs.back();
  std::vector<double> diffs;
  for (std::size_t k = 0; k < values.size(); ++k) {
    SweepMember& m = runs.members[k];
    m.reference_QT = distance_QT(runs.trajs[k], ref);
    m.reference_T = distance_T(runs.trajs[k], ref);
    if (k + 1 < values.size()) diffs.push_back(m.reference_QT);
  }
  rep.reference = runs.members.back();
  if (!has_one) {
    runs.members.pop_back();
    runs.trajs.pop_back();
  }
  rep.members = runs.members;
  fill_cauchy(rep, runs, plan.values, plan.zero_gap);
  rep.reference_decreasing = decreasing_sequence(diffs, plan.zero_gap);
  if (!rep.reference_decreasing && !diffs.empty() && diffs.back() > plan.zero_gap)
    rep.notes.push_back("possible non-uniqueness: differences to the s = 1 run stagnate at " +
                        fmt(diffs.back()));
  fill_apriori(rep);
  rep.pass = rep.reference_decreasing;
  fill_vw(rep);
  if (rep.reference && !rep.reference->vw_pass) {
    rep.pass = false;
    rep.notes.push_back("very weak residual of the s = 1 run below tolerance");
  }
  return rep;
}

SweepReport sweep_timestep(const SweepPlan& plan) {
  require_axis(plan, SweepAxis::Timestep);
  std::vector<ProblemSpec> specs;
  std::vector<double> h;
  for (double v : plan.values) {
    specs.push_back(member_spec(plan, v));
    h.push_back(specs.back().h());
  }
  const auto tests = library_for(plan);
  auto runs = run_members(specs, plan.values, tests, {plan.tol_c1, plan.tol_c2, false},
                          plan.threads, "steps");
  SweepReport rep;
  rep.axis = plan.axis;
  rep.members = runs.members;
  fill_cauchy(rep, runs, h, plan.zero_gap);
  std::vector<double> energy;
  for (const auto& m : rep.members) energy.push_back(std::abs(m.energy_residual));
  const bool energy_ok = decreasing_sequence(energy, plan.zero_gap);
  if (!energy_ok) rep.notes.push_back("energy residual does not decrease under refinement");
  fill_apriori(rep);
  rep.pass = rep.cauchy_decreasing && energy_ok;
  fill_vw(rep);
  return rep;
}

SweepReport run_sweep(const SweepPlan& plan) {
  switch (plan.axis) {
    case SweepAxis::Epsilon: return sweep_epsilon(plan);
    case SweepAxis::Viscosity: return sweep_viscosity(plan);
    case SweepAxis::ExponentS: return sweep_exponent(plan);
    case SweepAxis::Timestep: return sweep_timestep(plan);
  }
  throw SweepError("unknown sweep axis");
}

double calibrate_tolerance(const ProblemSpec& free_problem, int test_count, std::uint64_t seed) {
  const auto tests = build_test_library(free_problem.grid, free_problem.T, test_count, seed);
  const Trajectory traj = run(free_problem);
  double worst = 0.0;
  for (const auto& t : very_weak_terms(traj, tests))
    worst = std::max(worst, std::abs(t.residual(free_problem.nu)));
  return 2.0 * worst / traj.h();
}

SweepReport weak_solution_residual_study(const ProblemSpec& spec,
                                         const std::vector<std::pair<int, double>>& resolutions,
                                         int test_count, std::uint64_t seed, int threads) {
  if (resolutions.empty()) throw SweepError("resolution list must be nonempty");
  if (!(spec.nu > 0.0)) throw SweepError("residual study needs nu > 0");
  std::vector<ProblemSpec> specs;
  std::vector<double> values;
  for (const auto& [steps, eps] : resolutions) {
    ProblemSpec p = spec;
    p.steps = steps;
    p.epsilon = eps;
    specs.push_back(std::move(p));
    values.push_back(double(steps));
  }
  const auto tests =
      test_count > 0 ? build_test_library(spec.grid, spec.T, test_count, seed)
                     : std::vector<TestFunction>{};
  auto runs = run_members(specs, values, tests, {-1.0, 0.0, true}, threads, "steps");
  SweepReport rep;
  rep.axis = SweepAxis::Timestep;
  rep.members = runs.members;
  std::vector<double> identity;
  for (const auto& m : rep.members) {
    identity.push_back(m.identity_max_abs);
    // The step equation tested with P(u_j) - u_j + eta bump is nonnegative up
    // to the Newton tolerance.
    if (m.vi_residual < -1e-8) {
      rep.pass = false;
      rep.notes.push_back("variational inequality residual " + fmt(m.vi_residual) +
                          " negative at steps = " + fmt(m.value));
    }
    if (m.vi_self != 0.0) {
      rep.pass = false;
      rep.notes.push_back("self-paired inequality residual nonzero");
    }
  }
  if (!decreasing_sequence(identity, 1e-14)) {
    rep.pass = false;
    rep.notes.push_back("weak identity residual does not decrease under refinement");
  }
  return rep;
}

}  // namespace fracwave
