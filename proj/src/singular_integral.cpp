// Independent real-space evaluation of the fractional Laplacian, used as an
// oracle for the spectral operators.

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracwave/frac_ops.hpp"

namespace fracwave {

namespace {

double at(const std::vector<double>& u, long i) {
  return (i < 0 || i >= long(u.size())) ? 0.0 : u[std::size_t(i)];
}

// 1D: the far field is summed symmetrically,
//   int_delta^inf (2u(x) - u(x+r) - u(x-r)) r^(-1-2s) dr,
// by the trapezoid rule with Euler-Maclaurin end corrections up to R = N dx,
// beyond which u(x +- r) = 0 and the integral is analytic.
Field oracle_1d(const Field& u, double s, int m) {
  const GridSpec& g = u.grid;
  const long N = g.N;
  const double dx = g.dx;
  const double c = fractional_laplacian_constant(1, s);
  const double delta = m * dx;
  const double p = -1.0 - 2.0 * s;
  Field out = Field::scalar(g);
  const std::vector<double>& v = u.values;
  std::vector<double> rpow(std::size_t(N) + 1);
  for (long k = 1; k <= N; ++k) rpow[std::size_t(k)] = std::pow(k * dx, p);
  for (long i = 0; i < N; ++i) {
    const double ui = v[std::size_t(i)];
    auto gval = [&](long k) { return 2.0 * ui - at(v, i + k) - at(v, i - k); };
    double trap = 0.0;
    for (long k = m; k <= N; ++k) {
      const double w = (k == m || k == N) ? 0.5 : 1.0;
      trap += w * gval(k) * rpow[std::size_t(k)];
    }
    trap *= dx;
    // f'(r) = g'(r) r^p + p g(r) r^(p-1), with g'(r) = u'(x - r) - u'(x + r).
    const double gprime =
        ((at(v, i - m + 1) - at(v, i - m - 1)) - (at(v, i + m + 1) - at(v, i + m - 1))) /
        (2.0 * dx);
    const double fp_lo = gprime * std::pow(delta, p) + p * gval(m) * std::pow(delta, p - 1.0);
    const double R = N * dx;
    const double fp_hi = p * 2.0 * ui * std::pow(R, p - 1.0);
    const double em = -dx * dx / 12.0 * (fp_hi - fp_lo);
    const double tail = 2.0 * ui * std::pow(R, -2.0 * s) / (2.0 * s);
    const double upp = (at(v, i + 1) - 2.0 * ui + at(v, i - 1)) / (dx * dx);
    const double near = -upp * std::pow(delta, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    out.values[std::size_t(i)] = c * (near + trap + em + tail);
  }
  return out;
}

// Distance from (x, y) to the boundary of [0, B]^2 along direction theta.
double exit_distance(double x, double y, double B, double theta) {
  const double cx = std::cos(theta), cy = std::sin(theta);
  double t = std::numeric_limits<double>::infinity();
  if (cx > 0) t = std::min(t, (B - x) / cx);
  if (cx < 0) t = std::min(t, -x / cx);
  if (cy > 0) t = std::min(t, (B - y) / cy);
  if (cy < 0) t = std::min(t, -y / cy);
  return t;
}

// 2D: lattice sum over |r| >= delta inside the box, analytic tail outside.
Field oracle_2d(const Field& u, double s, int m) {
  const GridSpec& g = u.grid;
  const int N = g.N;
  const double dx = g.dx;
  const double c = fractional_laplacian_constant(2, s);
  const double delta = m * dx;
  const double B = g.box();
  const int n_theta = 720;
  Field out = Field::scalar(g);
  const std::vector<double>& v = u.values;
  auto val = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= N || iy >= N) return 0.0;
    return v[std::size_t(iy) * N + ix];
  };
  // Kernel weights on the offset lattice.
  std::vector<double> kern(std::size_t(2 * N + 1) * std::size_t(2 * N + 1), 0.0);
  for (int q = -N; q <= N; ++q)
    for (int p = -N; p <= N; ++p) {
      const double r = dx * std::sqrt(double(p) * p + double(q) * q);
      if (r >= delta - 1e-12 * dx)
        kern[std::size_t(q + N) * std::size_t(2 * N + 1) + std::size_t(p + N)] =
            dx * dx * std::pow(r, -2.0 - 2.0 * s);
    }
  for (int iy = 0; iy < N; ++iy)
    for (int ix = 0; ix < N; ++ix) {
      const double ui = val(ix, iy);
      double sum = 0.0;
      for (int jy = 0; jy < N; ++jy)
        for (int jx = 0; jx < N; ++jx) {
          const double w = kern[std::size_t(jy - iy + N) * std::size_t(2 * N + 1) +
                                std::size_t(jx - ix + N)];
          if (w != 0.0) sum += (ui - v[std::size_t(jy) * N + jx]) * w;
        }
      double tail = 0.0;
      if (ui != 0.0) {
        const double x = g.coord(ix), y = g.coord(iy);
        for (int k = 0; k < n_theta; ++k) {
          const double th = (k + 0.5) * 2.0 * M_PI / n_theta;
          tail += std::pow(exit_distance(x, y, B, th), -2.0 * s) / (2.0 * s);
        }
        tail *= ui * 2.0 * M_PI / n_theta;
      }
      const double lap = (val(ix + 1, iy) + val(ix - 1, iy) + val(ix, iy + 1) + val(ix, iy - 1) -
                          4.0 * ui) /
                         (dx * dx);
      const double near = -0.5 * lap * M_PI * std::pow(delta, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
      out.values[std::size_t(iy) * N + ix] = c * (near + sum + tail);
    }
  return out;
}

}  // namespace

// The cutoff is rounded to the nearest multiple of the grid spacing.
Field singular_integral_laplacian(const Field& u, double s, double delta) {
  if (u.components != 1) throw DomainError("oracle expects a scalar field");
  if (!(s > 0.0) || !(s < 1.0)) throw DomainError("oracle needs s in (0,1)");
  if (!(delta > 0.0)) throw DomainError("cutoff must be positive");
  const double dx = u.grid.dx;
  if (delta < 2.0 * dx * (1.0 - 1e-12)) throw DomainError("cutoff must be at least two grid spacings");
  const int m = int(std::lround(delta / dx));
  return u.grid.d == 1 ? oracle_1d(u, s, m) : oracle_2d(u, s, m);
}

}  // namespace fracwave
