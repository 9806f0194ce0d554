#include "fracwave/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracwave/kernels.hpp"

namespace fracwave {

bool GridSpec::interior(std::size_t idx) const {
  if (torus) return true;
  if (d == 1) return axis_interior(int(idx));
  const int ix = int(idx % std::size_t(N));
  const int iy = int(idx / std::size_t(N));
  return axis_interior(ix) && axis_interior(iy);
}

std::vector<std::size_t> GridSpec::interior_indices() const {
  std::vector<std::size_t> out;
  out.reserve(interior_points());
  if (torus) {
    for (std::size_t i = 0; i < points(); ++i) out.push_back(i);
    return out;
  }
  const int lo = interior_first;
  const int hi = interior_first + interior_count;
  if (d == 1) {
    for (int i = lo; i < hi; ++i) out.push_back(std::size_t(i));
  } else {
    for (int iy = lo; iy < hi; ++iy)
      for (int ix = lo; ix < hi; ++ix) out.push_back(std::size_t(iy) * N + ix);
  }
  return out;
}

GridSpec build_grid(int d, double L, int kappa, int N) {
  if (d != 1 && d != 2) throw DomainError("dimension must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("domain extent must be positive");
  if (kappa < 2) throw DomainError("extension factor too small");
  if (N <= 0) throw DomainError("points per side must be positive");
  if (N % kappa != 0) throw DomainError("points per side must be divisible by the extension factor");
  const int m = N / kappa;
  if (((kappa - 1) * m) % 2 != 0)
    throw DomainError("omega does not align with grid nodes for this kappa and N");
  GridSpec g;
  g.d = d;
  g.L = L;
  g.kappa = kappa;
  g.N = N;
  g.dx = kappa * L / N;
  g.offset = 0.5 * (kappa - 1) * L;
  g.interior_first = (kappa - 1) * m / 2;
  g.interior_count = m;
  g.torus = false;
  return g;
}

GridSpec build_torus(int d, double L, int N) {
  if (d != 1 && d != 2) throw DomainError("dimension must be 1 or 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("domain extent must be positive");
  if (N <= 0) throw DomainError("points per side must be positive");
  GridSpec g;
  g.d = d;
  g.L = L;
  g.kappa = 1;
  g.N = N;
  g.dx = L / N;
  g.offset = 0.0;
  g.interior_first = 0;
  g.interior_count = N;
  g.torus = true;
  return g;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw DomainError("grid mismatch");
}

void mask_in_place(const GridSpec& g, std::span<double> v) {
  if (g.torus) return;
  const int lo = g.interior_first;
  const int hi = g.interior_first + g.interior_count;
  const int N = g.N;
  if (g.d == 1) {
    std::fill(v.begin(), v.begin() + lo, 0.0);
    std::fill(v.begin() + hi, v.begin() + N, 0.0);
    return;
  }
  for (int iy = 0; iy < N; ++iy) {
    double* row = v.data() + std::size_t(iy) * N;
    if (iy < lo || iy >= hi) {
      std::fill(row, row + N, 0.0);
    } else {
      std::fill(row, row + lo, 0.0);
      std::fill(row + hi, row + N, 0.0);
    }
  }
}

void mask_in_place(Field& f) {
  for (int c = 0; c < f.components; ++c) mask_in_place(f.grid, f.component(c));
}

Field mask_to_interior(const Field& f) {
  Field out = f;
  mask_in_place(out);
  return out;
}

bool is_interior_supported(const Field& f, double tol) {
  const std::size_t n = f.points();
  for (int c = 0; c < f.components; ++c) {
    auto v = f.component(c);
    for (std::size_t i = 0; i < n; ++i)
      if (!f.grid.interior(i) && std::abs(v[i]) > tol) return false;
  }
  return true;
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  if (a.components != b.components) throw DomainError("component mismatch");
  return kernels::dot(a.values, b.values) * a.grid.cell_volume();
}

double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

MatrixField constant_matrix(const GridSpec& g, const std::vector<double>& entries) {
  if (entries.size() != std::size_t(g.d * g.d)) throw DomainError("matrix must have d*d entries");
  MatrixField M;
  M.d = g.d;
  M.points = g.points();
  M.data.resize(std::size_t(g.d * g.d) * M.points);
  for (int p = 0; p < g.d; ++p)
    for (int q = 0; q < g.d; ++q)
      std::fill(M.entry(p, q), M.entry(p, q) + M.points, entries[std::size_t(p * g.d + q)]);
  return M;
}

MatrixField diagonal_matrix(const GridSpec& g, const std::vector<std::vector<double>>& diag) {
  if (diag.size() != std::size_t(g.d)) throw DomainError("diagonal needs d node tables");
  MatrixField M;
  M.d = g.d;
  M.points = g.points();
  M.data.assign(std::size_t(g.d * g.d) * M.points, 0.0);
  for (int p = 0; p < g.d; ++p) {
    if (diag[std::size_t(p)].size() != M.points)
      throw DomainError("diagonal table size does not match the grid");
    std::copy(diag[std::size_t(p)].begin(), diag[std::size_t(p)].end(), M.entry(p, p));
  }
  return M;
}

MatrixField transpose(const MatrixField& M) {
  MatrixField T = M;
  for (int p = 0; p < M.d; ++p)
    for (int q = 0; q < M.d; ++q) std::copy(M.entry(q, p), M.entry(q, p) + M.points, T.entry(p, q));
  return T;
}

namespace {

// Smallest eigenvalue of the symmetric part and largest singular value.
void node_bounds(const MatrixField& M, std::size_t i, double& lo, double& hi) {
  if (M.d == 1) {
    const double m = M.entry(0, 0)[i];
    lo = m;
    hi = std::abs(m);
    return;
  }
  const double a = M.entry(0, 0)[i], b = M.entry(0, 1)[i];
  const double c = M.entry(1, 0)[i], e = M.entry(1, 1)[i];
  const double off = 0.5 * (b + c);
  lo = 0.5 * (a + e) - std::sqrt(0.25 * (a - e) * (a - e) + off * off);
  // Eigenvalues of M^T M.
  const double p = a * a + c * c, q = a * b + c * e, r = b * b + e * e;
  const double lam = 0.5 * (p + r) + std::sqrt(0.25 * (p - r) * (p - r) + q * q);
  hi = std::sqrt(lam);
}

double scalar_multiple(const MatrixField& M) {
  const double v = M.entry(0, 0)[0];
  for (int p = 0; p < M.d; ++p)
    for (int q = 0; q < M.d; ++q) {
      const double target = p == q ? v : 0.0;
      const double* e = M.entry(p, q);
      for (std::size_t i = 0; i < M.points; ++i)
        if (e[i] != target) return 0.0;
    }
  return v;
}

}  // namespace

EllipticBounds matrix_bounds(const MatrixField& M) {
  EllipticBounds out{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < M.points; ++i) {
    double lo = 0.0, hi = 0.0;
    node_bounds(M, i, lo, hi);
    out.lo = std::min(out.lo, lo);
    out.hi = std::max(out.hi, hi);
  }
  return out;
}

bool is_symmetric(const MatrixField& M, double tol) {
  if (M.d == 1) return true;
  const double* b = M.entry(0, 1);
  const double* c = M.entry(1, 0);
  for (std::size_t i = 0; i < M.points; ++i)
    if (std::abs(b[i] - c[i]) > tol) return false;
  return true;
}

CoefficientField CoefficientField::identity(const GridSpec& g, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("coefficient multiples must be positive");
  std::vector<double> ea(std::size_t(g.d * g.d), 0.0), eb(ea);
  for (int p = 0; p < g.d; ++p) {
    ea[std::size_t(p * g.d + p)] = a;
    eb[std::size_t(p * g.d + p)] = b;
  }
  return from_matrices(g, constant_matrix(g, ea), constant_matrix(g, eb));
}

CoefficientField CoefficientField::from_matrices(const GridSpec& g, MatrixField A, MatrixField B) {
  if (A.d != g.d || B.d != g.d || A.points != g.points() || B.points != g.points())
    throw DomainError("coefficient tables do not match the grid");
  if (!is_symmetric(B)) throw DomainError("B must be symmetric at every node");
  const EllipticBounds ba = matrix_bounds(A);
  const EllipticBounds bb = matrix_bounds(B);
  if (!(ba.lo > 0.0)) throw DomainError("A is not strictly elliptic");
  if (!(bb.lo > 0.0)) throw DomainError("B is not strictly elliptic");
  CoefficientField cf;
  cf.grid = g;
  cf.A_scalar = scalar_multiple(A);
  cf.B_scalar = scalar_multiple(B);
  cf.A = std::move(A);
  cf.B = std::move(B);
  cf.a_lo = ba.lo;
  cf.a_hi = ba.hi;
  cf.b_lo = bb.lo;
  cf.b_hi = bb.hi;
  return cf;
}

EllipticityCheck sample_ellipticity(const MatrixField& M, double lo, double hi, int samples,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_int_distribution<int> coin(0, 1);
  EllipticityCheck res;
  res.worst_lower = std::numeric_limits<double>::infinity();
  res.worst_upper = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * std::max(1.0, hi);
  for (int k = 0; k < samples; ++k) {
    double eta[2], zeta[2];
    if (M.d == 1) {
      eta[0] = coin(rng) ? 1.0 : -1.0;
      zeta[0] = coin(rng) ? 1.0 : -1.0;
    } else {
      const double t1 = angle(rng), t2 = angle(rng);
      eta[0] = std::cos(t1);
      eta[1] = std::sin(t1);
      zeta[0] = std::cos(t2);
      zeta[1] = std::sin(t2);
    }
    for (std::size_t i = 0; i < M.points; ++i) {
      double quad = 0.0, bil = 0.0;
      for (int p = 0; p < M.d; ++p)
        for (int q = 0; q < M.d; ++q) {
          const double m = M.entry(p, q)[i];
          quad += eta[p] * m * eta[q];
          bil += zeta[p] * m * eta[q];
        }
      res.worst_lower = std::min(res.worst_lower, quad - lo);
      res.worst_upper = std::min(res.worst_upper, hi - bil);
    }
  }
  res.pass = res.worst_lower >= -slack && res.worst_upper >= -slack;
  return res;
}

Field random_field(const GridSpec& g, int components, std::uint64_t seed, bool interior_only) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(g, components);
  for (double& v : f.values) v = gauss(rng);
  if (interior_only) mask_in_place(f);
  return f;
}

}  // namespace fracwave
