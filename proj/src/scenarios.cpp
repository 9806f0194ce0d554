#include "fracwave/scenarios.hpp"

#include "fracwave/profiles.hpp"

namespace fracwave {

namespace {

ProblemSpec string_base(const ScenarioParams& p) {
  ProblemSpec spec;
  spec.grid = build_grid(1, 10.0, p.kappa, p.N);
  spec.coeffs = CoefficientField::identity(spec.grid);
  spec.s = p.s;
  spec.nu = p.nu;
  spec.epsilon = p.epsilon;
  spec.T = p.T;
  spec.steps = p.steps;
  ProfileSpec b;
  b.type = "bump";
  b.radius = 0.45;
  b.amplitude = 0.2;
  spec.w0 = evaluate_profile(b, spec.grid);
  b.amplitude = -1.0;
  spec.w1 = evaluate_profile(b, spec.grid);
  spec.g = Field::scalar(spec.grid);
  return spec;
}

}  // namespace

ProblemSpec bouncing_string(const ScenarioParams& p) {
  ProblemSpec spec = string_base(p);
  spec.graph = MonotoneGraph::lower(0.0);
  return spec;
}

ProblemSpec free_wave(const ScenarioParams& p) {
  ProblemSpec spec = string_base(p);
  spec.graph = MonotoneGraph::free();
  return spec;
}

ProblemSpec torus_mode(const ScenarioParams& p, int k) {
  ProblemSpec spec;
  spec.grid = build_torus(1, 1.0, p.N);
  spec.coeffs = CoefficientField::identity(spec.grid);
  spec.s = p.s;
  spec.nu = p.nu;
  spec.epsilon = p.epsilon;
  spec.T = p.T;
  spec.steps = p.steps;
  spec.graph = MonotoneGraph::free();
  ProfileSpec m;
  m.type = "torus_mode";
  m.mode = k;
  spec.w0 = evaluate_profile(m, spec.grid);
  m.amplitude = 0.5;
  spec.w1 = evaluate_profile(m, spec.grid);
  spec.g = Field::scalar(spec.grid);
  return spec;
}

}  // namespace fracwave
