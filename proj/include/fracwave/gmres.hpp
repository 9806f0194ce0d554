#pragma once

// Restarted GMRES with right preconditioning for matrix-free operators.

#include <functional>
#include <span>

namespace fracwave {

using LinearMap = std::function<void(std::span<const double> in, std::span<double> out)>;

struct GmresOptions {
  int restart = 50;
  int max_iters = 200;
  double rtol = 1e-12;  // relative to ||b||
  double atol = 0.0;
};

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // true residual norm ||b - A x|| at exit
};

// Solves A x = b with x holding the initial guess on entry. `precond` may be
// empty; when set the iteration runs on A M y = b with x = M y.
GmresResult gmres(const LinearMap& A, const LinearMap& precond, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opt = {});

}  // namespace fracwave
