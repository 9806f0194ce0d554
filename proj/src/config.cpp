#include "fracwave/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace fracwave {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid configuration:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

// Collects every violation instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  // Returns the object at key (null when absent) after checking
  // that only the listed keys occur.
  const json* section(const json& parent, const std::string& key, const std::string& path,
                      const std::set<std::string>& allowed) {
    if (!parent.contains(key)) return nullptr;
    const json& j = parent.at(key);
    if (!j.is_object()) {
      error(path, "must be an object");
      return nullptr;
    }
    check_keys(j, path, allowed);
    return &j;
  }

  void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!allowed.count(it.key())) error(join(path, it.key()), "unknown key");
  }

  void number(const json* j, const char* key, const std::string& path, double& out) {
    if (!j || !j->contains(key)) return;
    const json& v = j->at(key);
    if (!v.is_number()) return error(join(path, key), "must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) error(join(path, key), "must be finite");
  }

  template <class I>
  void integer(const json* j, const char* key, const std::string& path, I& out) {
    if (!j || !j->contains(key)) return;
    const json& v = j->at(key);
    if (!v.is_number_integer()) return error(join(path, key), "must be an integer");
    if constexpr (std::is_unsigned_v<I>) {
      if (v.is_number_unsigned())
        out = v.get<I>();
      else
        error(join(path, key), "must be nonnegative");
    } else {
      out = v.get<I>();
    }
  }

  void boolean(const json* j, const char* key, const std::string& path, bool& out) {
    if (!j || !j->contains(key)) return;
    const json& v = j->at(key);
    if (!v.is_boolean()) return error(join(path, key), "must be a boolean");
    out = v.get<bool>();
  }

  void string(const json* j, const char* key, const std::string& path, std::string& out) {
    if (!j || !j->contains(key)) return;
    const json& v = j->at(key);
    if (!v.is_string()) return error(join(path, key), "must be a string");
    out = v.get<std::string>();
  }

  bool numbers(const json& v, const std::string& path, std::vector<double>& out) {
    if (!v.is_array()) {
      error(path, "must be an array of numbers");
      return false;
    }
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) {
        error(path, "must be an array of numbers");
        return false;
      }
      out.push_back(x.get<double>());
    }
    return true;
  }

  void number_list(const json* j, const char* key, const std::string& path,
                   std::vector<double>& out) {
    if (!j || !j->contains(key)) return;
    numbers(j->at(key), join(path, key), out);
  }
};

void read_profile(Reader& r, const json& parent, const char* key, const std::string& path,
                  ProfileSpec& p) {
  const json* j = r.section(parent, key, path,
                            {"type", "amplitude", "center", "radius", "width", "mode", "values"});
  r.string(j, "type", path, p.type);
  r.number(j, "amplitude", path, p.amplitude);
  r.number_list(j, "center", path, p.center);
  r.number(j, "radius", path, p.radius);
  r.number(j, "width", path, p.width);
  r.integer(j, "mode", path, p.mode);
  r.number_list(j, "values", path, p.values);
  static const std::set<std::string> types{"zero", "constant", "bump", "gaussian", "mode",
                                           "torus_mode", "plucked", "table"};
  if (!types.count(p.type)) r.error(path + ".type", "unknown profile '" + p.type + "'");
}

void read_matrix(Reader& r, const json& parent, const char* key, const std::string& path,
                 MatrixConfig& m) {
  const json* j = r.section(parent, key, path, {"type", "scale", "values"});
  r.string(j, "type", path, m.type);
  r.number(j, "scale", path, m.scale);
  if (j && j->contains("values")) {
    const json& v = j->at("values");
    if (!v.is_array()) {
      r.error(path + ".values", "must be an array of tables");
    } else {
      m.values.clear();
      for (std::size_t k = 0; k < v.size(); ++k) {
        std::vector<double> t;
        if (r.numbers(v[k], path + ".values[" + std::to_string(k) + "]", t)) m.values.push_back(t);
      }
    }
  }
  if (m.type != "identity" && m.type != "diagonal" && m.type != "matrix")
    r.error(path + ".type", "must be identity, diagonal or matrix");
}

json profile_json(const ProfileSpec& p) {
  return json{{"type", p.type},     {"amplitude", p.amplitude}, {"center", p.center},
              {"radius", p.radius}, {"width", p.width},         {"mode", p.mode},
              {"values", p.values}};
}

json matrix_json(const MatrixConfig& m) {
  return json{{"type", m.type}, {"scale", m.scale}, {"values", m.values}};
}

MatrixField build_matrix(const GridSpec& g, const MatrixConfig& m, const std::string& path) {
  const int d = g.d;
  auto table = [&](std::size_t k) {
    const auto& t = m.values[k];
    if (t.size() == 1) return std::vector<double>(g.points(), t[0]);
    if (t.size() == g.points()) return t;
    throw DomainError(path + ".values[" + std::to_string(k) +
                      "]: table must hold 1 or " + std::to_string(g.points()) + " values");
  };
  if (m.type == "identity") {
    std::vector<double> e(std::size_t(d * d), 0.0);
    for (int p = 0; p < d; ++p) e[std::size_t(p * d + p)] = m.scale;
    return constant_matrix(g, e);
  }
  if (m.type == "diagonal") {
    if (m.values.size() != std::size_t(d))
      throw DomainError(path + ".values: diagonal needs " + std::to_string(d) + " tables");
    std::vector<std::vector<double>> diag;
    for (std::size_t k = 0; k < m.values.size(); ++k) {
      auto t = table(k);
      for (double& x : t) x *= m.scale;
      diag.push_back(std::move(t));
    }
    return diagonal_matrix(g, diag);
  }
  if (m.values.size() != std::size_t(d * d))
    throw DomainError(path + ".values: matrix needs " + std::to_string(d * d) + " tables");
  MatrixField M = constant_matrix(g, std::vector<double>(std::size_t(d * d), 0.0));
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q) {
      const auto t = table(std::size_t(p * d + q));
      for (std::size_t i = 0; i < t.size(); ++i) M.entry(p, q)[i] = m.scale * t[i];
    }
  return M;
}

CoefficientField build_coefficients(const GridSpec& g, const CoefficientConfig& c) {
  if (c.A.type == "identity" && c.B.type == "identity")
    return CoefficientField::identity(g, c.A.scale, c.B.scale);
  return CoefficientField::from_matrices(g, build_matrix(g, c.A, "coefficients.A"),
                                         build_matrix(g, c.B, "coefficients.B"));
}

// Semantic checks once the syntax has been read.
void validate(const RunConfig& c, Reader& r) {
  GridSpec grid;
  bool grid_ok = false;
  try {
    grid = build_grid(c.domain);
    grid_ok = true;
  } catch (const std::exception& e) {
    r.error("domain", e.what());
  }

  const auto& ph = c.physics;
  if (!(ph.s > 0.0 && ph.s <= 1.0)) r.error("physics.s", "s must lie in (0,1]");
  try {
    require_epsilon(ph.epsilon);
  } catch (const std::exception& e) {
    r.error("physics.epsilon", e.what());
  }
  if (!(ph.nu >= 0.0)) r.error("physics.nu", "nu must be nonnegative");
  if (ph.nu == 0.0 && !ph.allow_inviscid)
    r.error("physics.nu", "nu = 0 requires allow_inviscid");
  if (!(ph.T > 0.0)) r.error("physics.T", "T must be positive");
  if (ph.steps < 1) r.error("physics.steps", "steps must be at least 1");

  try {
    build_graph(c.graph);
  } catch (const std::exception& e) {
    r.error("graph", e.what());
  }

  if (grid_ok) {
    try {
      build_coefficients(grid, c.coefficients);
    } catch (const std::exception& e) {
      r.error("coefficients", e.what());
    }
    const std::pair<const char*, const ProfileSpec*> profiles[] = {
        {"data.w0", &c.data.w0}, {"data.w1", &c.data.w1}, {"data.g", &c.data.g}};
    for (const auto& [path, p] : profiles) {
      try {
        evaluate_profile(*p, grid);
      } catch (const std::exception& e) {
        r.error(path, e.what());
      }
    }
  }

  const auto& s = c.solver;
  if (!(s.newton_rtol > 0.0)) r.error("solver.newton_rtol", "must be positive");
  if (!(s.newton_atol >= 0.0)) r.error("solver.newton_atol", "must be nonnegative");
  if (s.newton_max_iters < 1) r.error("solver.newton_max_iters", "must be at least 1");
  if (s.armijo_max_halvings < 0) r.error("solver.armijo_max_halvings", "must be nonnegative");
  if (!(s.armijo_c > 0.0 && s.armijo_c < 1.0)) r.error("solver.armijo_c", "must lie in (0,1)");
  if (s.krylov_restart < 1) r.error("solver.krylov_restart", "must be at least 1");
  if (s.krylov_max_iters < 1) r.error("solver.krylov_max_iters", "must be at least 1");
  if (!(s.krylov_rtol > 0.0)) r.error("solver.krylov_rtol", "must be positive");

  try {
    const SweepAxis axis = parse_axis(c.sweep.axis);
    if (!c.sweep.values.empty()) {
      SweepPlan plan;
      plan.axis = axis;
      plan.values = c.sweep.values;
      plan.base.allow_inviscid = ph.allow_inviscid;
      validate_plan(plan);
    }
  } catch (const std::exception& e) {
    r.error("sweep", e.what());
  }
  if (c.sweep.test_count < 0) r.error("sweep.test_count", "must be nonnegative");

  static const std::set<std::string> formats{"csv", "json", "binary"};
  for (const auto& f : c.output.formats)
    if (!formats.count(f)) r.error("output.formats", "unknown format '" + f + "'");
  if (c.output.decimate < 1) r.error("output.decimate", "must be at least 1");
  if (c.output.directory.empty()) r.error("output.directory", "must be nonempty");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"root: must be an object"});
  RunConfig c;
  Reader r;
  r.check_keys(root, "", {"domain", "physics", "coefficients", "graph", "data", "solver", "sweep",
                          "output", "seed"});

  const json* d = r.section(root, "domain", "domain", {"d", "L", "kappa", "N", "torus"});
  r.integer(d, "d", "domain", c.domain.d);
  r.number(d, "L", "domain", c.domain.L);
  r.integer(d, "kappa", "domain", c.domain.kappa);
  r.integer(d, "N", "domain", c.domain.N);
  r.boolean(d, "torus", "domain", c.domain.torus);
  if (c.domain.torus && !(d && d->contains("kappa"))) c.domain.kappa = 1;

  const json* p = r.section(root, "physics", "physics",
                            {"s", "nu", "epsilon", "T", "steps", "allow_inviscid"});
  r.number(p, "s", "physics", c.physics.s);
  r.number(p, "nu", "physics", c.physics.nu);
  r.number(p, "epsilon", "physics", c.physics.epsilon);
  r.number(p, "T", "physics", c.physics.T);
  r.integer(p, "steps", "physics", c.physics.steps);
  r.boolean(p, "allow_inviscid", "physics", c.physics.allow_inviscid);

  if (const json* co = r.section(root, "coefficients", "coefficients", {"A", "B"})) {
    read_matrix(r, *co, "A", "coefficients.A", c.coefficients.A);
    read_matrix(r, *co, "B", "coefficients.B", c.coefficients.B);
  }

  const json* g = r.section(root, "graph", "graph",
                            {"type", "a", "b", "breakpoints", "slope_below", "slope_above"});
  r.string(g, "type", "graph", c.graph.type);
  r.number(g, "a", "graph", c.graph.a);
  r.number(g, "b", "graph", c.graph.b);
  r.number(g, "slope_below", "graph", c.graph.slope_below);
  r.number(g, "slope_above", "graph", c.graph.slope_above);
  if (g && g->contains("breakpoints")) {
    const json& bp = g->at("breakpoints");
    if (!bp.is_array()) {
      r.error("graph.breakpoints", "must be an array of [x, left, right] triples");
    } else {
      for (std::size_t k = 0; k < bp.size(); ++k) {
        std::vector<double> t;
        const std::string path = "graph.breakpoints[" + std::to_string(k) + "]";
        if (!r.numbers(bp[k], path, t)) continue;
        if (t.size() != 3) {
          r.error(path, "must be an [x, left, right] triple");
          continue;
        }
        c.graph.breakpoints.push_back({t[0], t[1], t[2]});
      }
    }
  }

  if (const json* da = r.section(root, "data", "data", {"w0", "w1", "g"})) {
    read_profile(r, *da, "w0", "data.w0", c.data.w0);
    read_profile(r, *da, "w1", "data.w1", c.data.w1);
    read_profile(r, *da, "g", "data.g", c.data.g);
  }

  const json* s = r.section(root, "solver", "solver",
                            {"newton_rtol", "newton_atol", "newton_max_iters",
                             "armijo_max_halvings", "armijo_c", "krylov_restart",
                             "krylov_max_iters", "krylov_rtol"});
  r.number(s, "newton_rtol", "solver", c.solver.newton_rtol);
  r.number(s, "newton_atol", "solver", c.solver.newton_atol);
  r.integer(s, "newton_max_iters", "solver", c.solver.newton_max_iters);
  r.integer(s, "armijo_max_halvings", "solver", c.solver.armijo_max_halvings);
  r.number(s, "armijo_c", "solver", c.solver.armijo_c);
  r.integer(s, "krylov_restart", "solver", c.solver.krylov_restart);
  r.integer(s, "krylov_max_iters", "solver", c.solver.krylov_max_iters);
  r.number(s, "krylov_rtol", "solver", c.solver.krylov_rtol);

  const json* sw = r.section(root, "sweep", "sweep",
                             {"axis", "values", "test_count", "tol_c1", "tol_c2"});
  r.string(sw, "axis", "sweep", c.sweep.axis);
  r.number_list(sw, "values", "sweep", c.sweep.values);
  r.integer(sw, "test_count", "sweep", c.sweep.test_count);
  r.number(sw, "tol_c1", "sweep", c.sweep.tol_c1);
  r.number(sw, "tol_c2", "sweep", c.sweep.tol_c2);

  const json* o = r.section(root, "output", "output", {"directory", "formats", "decimate"});
  r.string(o, "directory", "output", c.output.directory);
  if (o && o->contains("formats")) {
    const json& f = o->at("formats");
    if (!f.is_array()) {
      r.error("output.formats", "must be an array of strings");
    } else {
      c.output.formats.clear();
      for (const auto& x : f) {
        if (!x.is_string()) {
          r.error("output.formats", "must be an array of strings");
          break;
        }
        c.output.formats.push_back(x.get<std::string>());
      }
    }
  }
  r.integer(o, "decimate", "output", c.output.decimate);

  r.integer(&root, "seed", "", c.seed);

  if (r.errors.empty()) validate(c, r);
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json bps = json::array();
  for (const auto& b : c.graph.breakpoints) bps.push_back({b.x, b.left, b.right});
  json root{
      {"domain",
       {{"d", c.domain.d}, {"L", c.domain.L}, {"kappa", c.domain.kappa}, {"N", c.domain.N},
        {"torus", c.domain.torus}}},
      {"physics",
       {{"s", c.physics.s},
        {"nu", c.physics.nu},
        {"epsilon", c.physics.epsilon},
        {"T", c.physics.T},
        {"steps", c.physics.steps},
        {"allow_inviscid", c.physics.allow_inviscid}}},
      {"coefficients", {{"A", matrix_json(c.coefficients.A)}, {"B", matrix_json(c.coefficients.B)}}},
      {"graph",
       {{"type", c.graph.type},
        {"a", c.graph.a},
        {"b", c.graph.b},
        {"breakpoints", bps},
        {"slope_below", c.graph.slope_below},
        {"slope_above", c.graph.slope_above}}},
      {"data",
       {{"w0", profile_json(c.data.w0)},
        {"w1", profile_json(c.data.w1)},
        {"g", profile_json(c.data.g)}}},
      {"solver",
       {{"newton_rtol", c.solver.newton_rtol},
        {"newton_atol", c.solver.newton_atol},
        {"newton_max_iters", c.solver.newton_max_iters},
        {"armijo_max_halvings", c.solver.armijo_max_halvings},
        {"armijo_c", c.solver.armijo_c},
        {"krylov_restart", c.solver.krylov_restart},
        {"krylov_max_iters", c.solver.krylov_max_iters},
        {"krylov_rtol", c.solver.krylov_rtol}}},
      {"sweep",
       {{"axis", c.sweep.axis},
        {"values", c.sweep.values},
        {"test_count", c.sweep.test_count},
        {"tol_c1", c.sweep.tol_c1},
        {"tol_c2", c.sweep.tol_c2}}},
      {"output",
       {{"directory", c.output.directory},
        {"formats", c.output.formats},
        {"decimate", c.output.decimate}}},
      {"seed", c.seed}};
  return root.dump(2) + "\n";
}

std::string config_hash(const RunConfig& c) {
  const std::string text = serialize_config(c);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GridSpec build_grid(const DomainConfig& d) {
  if (d.torus) {
    if (d.kappa != 1) throw DomainError("torus domains require kappa = 1");
    return build_torus(d.d, d.L, d.N);
  }
  return build_grid(d.d, d.L, d.kappa, d.N);
}

MonotoneGraph build_graph(const GraphConfig& g) {
  if (g.type == "free") return MonotoneGraph::free();
  if (g.type == "lower") return MonotoneGraph::lower(g.a);
  if (g.type == "upper") return MonotoneGraph::upper(g.b);
  if (g.type == "two_sided") return MonotoneGraph::indicator(g.a, g.b);
  if (g.type == "staircase")
    return MonotoneGraph::staircase(g.breakpoints, g.slope_below, g.slope_above);
  throw MonotoneError("unknown graph type '" + g.type + "'");
}

ProblemSpec build_problem(const RunConfig& c) {
  ProblemSpec p;
  p.grid = build_grid(c.domain);
  p.coeffs = build_coefficients(p.grid, c.coefficients);
  p.s = c.physics.s;
  p.nu = c.physics.nu;
  p.epsilon = c.physics.epsilon;
  p.T = c.physics.T;
  p.steps = c.physics.steps;
  p.allow_inviscid = c.physics.allow_inviscid;
  p.graph = build_graph(c.graph);
  p.w0 = evaluate_profile(c.data.w0, p.grid);
  p.w1 = evaluate_profile(c.data.w1, p.grid);
  p.g = evaluate_profile(c.data.g, p.grid);
  p.solver.newton_rtol = c.solver.newton_rtol;
  p.solver.newton_atol = c.solver.newton_atol;
  p.solver.newton_max_iters = c.solver.newton_max_iters;
  p.solver.armijo_max_halvings = c.solver.armijo_max_halvings;
  p.solver.armijo_c = c.solver.armijo_c;
  p.solver.krylov.restart = c.solver.krylov_restart;
  p.solver.krylov.max_iters = c.solver.krylov_max_iters;
  p.solver.krylov.rtol = c.solver.krylov_rtol;
  return p;
}

SweepPlan build_sweep(const RunConfig& c, int threads) {
  SweepPlan plan;
  plan.base = build_problem(c);
  plan.axis = parse_axis(c.sweep.axis);
  plan.values = c.sweep.values;
  plan.test_count = c.sweep.test_count;
  plan.seed = c.seed;
  plan.threads = threads;
  plan.tol_c1 = c.sweep.tol_c1;
  plan.tol_c2 = c.sweep.tol_c2;
  plan.output = c.output.directory;
  validate_plan(plan);
  return plan;
}

}  // namespace fracwave
