#include "fracwave/gmres.hpp"

#include <cmath>
#include <vector>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

}  // namespace

GmresResult gmres(const LinearMap& A, const LinearMap& precond, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opt) {
  const std::size_t n = b.size();
  const int m = std::max(1, opt.restart);
  GmresResult res;
  const double bnorm = norm2(b);
  const double target = std::max(opt.rtol * bnorm, opt.atol);

  std::vector<double> r(n), w(n), z(n);
  std::vector<std::vector<double>> V(static_cast<std::size_t>(m) + 1, std::vector<double>(n));
  std::vector<double> H(std::size_t(m + 1) * std::size_t(m), 0.0);
  const std::size_t ms = static_cast<std::size_t>(m);
  std::vector<double> cs(ms), sn(ms), g(ms + 1);
  auto h = [&](int i, int j) -> double& { return H[std::size_t(i) * std::size_t(m) + std::size_t(j)]; };

  auto residual = [&]() {
    A(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    return norm2(r);
  };

  double beta = residual();
  res.residual = beta;
  if (beta <= target) {
    res.converged = true;
    return res;
  }

  while (res.iterations < opt.max_iters) {
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    bool happy = false;
    for (; k < m && res.iterations < opt.max_iters; ++k) {
      ++res.iterations;
      if (precond) {
        precond(V[std::size_t(k)], z);
        A(z, w);
      } else {
        A(V[std::size_t(k)], w);
      }
      // Modified Gram-Schmidt.
      for (int i = 0; i <= k; ++i) {
        h(i, k) = kernels::dot(w, V[std::size_t(i)]);
        kernels::axpy(-h(i, k), V[std::size_t(i)], w);
      }
      const double hn = norm2(w);
      h(k + 1, k) = hn;
      for (int i = 0; i < k; ++i) {
        const double t = cs[std::size_t(i)] * h(i, k) + sn[std::size_t(i)] * h(i + 1, k);
        h(i + 1, k) = -sn[std::size_t(i)] * h(i, k) + cs[std::size_t(i)] * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      cs[std::size_t(k)] = denom == 0.0 ? 1.0 : h(k, k) / denom;
      sn[std::size_t(k)] = denom == 0.0 ? 0.0 : h(k + 1, k) / denom;
      h(k, k) = denom;
      h(k + 1, k) = 0.0;
      g[std::size_t(k) + 1] = -sn[std::size_t(k)] * g[std::size_t(k)];
      g[std::size_t(k)] = cs[std::size_t(k)] * g[std::size_t(k)];
      if (hn <= 1e-300) {
        happy = true;
        ++k;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) V[std::size_t(k) + 1][i] = w[i] / hn;
      if (std::abs(g[std::size_t(k) + 1]) <= target) {
        ++k;
        break;
      }
    }
    // Back substitution for the k x k upper-triangular system.
    std::vector<double> y(std::size_t(k), 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[std::size_t(i)];
      for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[std::size_t(j)];
      y[std::size_t(i)] = h(i, i) == 0.0 ? 0.0 : s / h(i, i);
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) kernels::axpy(y[std::size_t(j)], V[std::size_t(j)], w);
    if (precond) {
      precond(w, z);
      kernels::axpy(1.0, z, x);
    } else {
      kernels::axpy(1.0, w, x);
    }
    beta = residual();
    res.residual = beta;
    if (beta <= target) {
      res.converged = true;
      return res;
    }
    if (happy) break;
  }
  res.converged = res.residual <= target;
  return res;
}

}  // namespace fracwave
