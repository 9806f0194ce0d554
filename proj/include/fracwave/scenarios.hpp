#pragma once

// Reference problem set-ups shared by the CLI, the harness and the acceptance
// suite.

#include "fracwave/rothe.hpp"

namespace fracwave {

struct ScenarioParams {
  double epsilon = 1e-2;
  double nu = 1e-2;
  double s = 0.75;
  int steps = 1000;
  double T = 2.0;
  int N = 512;
  int kappa = 8;
};

// 1D string of length 10 released at 0.2 bump(0.45) with velocity -bump(0.45)
// towards the zero obstacle u >= 0.
ProblemSpec bouncing_string(const ScenarioParams& p);

// Same data with beta = 0.
ProblemSpec free_wave(const ScenarioParams& p);

// Torus of length 1, identity coefficients, w0 = sin(2 pi k x),
// w1 = 0.5 sin(2 pi k x); ScenarioParams::N sets the torus resolution.
ProblemSpec torus_mode(const ScenarioParams& p, int k);

}  // namespace fracwave
