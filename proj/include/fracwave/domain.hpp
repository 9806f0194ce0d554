#pragma once

// Uniform cell-centred grids on a periodic extended box [0, kappa*L]^d that
// contains the physical domain Omega = (o, o + L)^d, o = (kappa - 1) L / 2.
// Node i sits at x_i = (i + 1/2) dx with dx = kappa L / N, so Omega holds
// exactly N / kappa nodes per side.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracwave {

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  int d = 1;
  double L = 1.0;
  int kappa = 8;
  int N = 512;
  double dx = 0.0;
  double offset = 0.0;   // left edge of Omega inside the extended box
  int interior_first = 0;
  int interior_count = 0;  // nodes of Omega per side
  bool torus = false;      // kappa = 1, every node interior, no exterior condition

  std::size_t points() const { return d == 1 ? std::size_t(N) : std::size_t(N) * std::size_t(N); }
  double box() const { return kappa * L; }
  double cell_volume() const { return d == 1 ? dx : dx * dx; }

  // Coordinate of node i along one axis, extended-box and Omega-local frames.
  double coord(int i) const { return (i + 0.5) * dx; }
  double local_coord(int i) const { return coord(i) - offset; }

  bool axis_interior(int i) const {
    return i >= interior_first && i < interior_first + interior_count;
  }
  // Flat index is iy * N + ix in 2D.
  bool interior(std::size_t idx) const;

  std::size_t interior_points() const {
    return d == 1 ? std::size_t(interior_count)
                  : std::size_t(interior_count) * std::size_t(interior_count);
  }
  // Flat indices of the Omega nodes in increasing order.
  std::vector<std::size_t> interior_indices() const;

  bool operator==(const GridSpec& o) const {
    return d == o.d && L == o.L && kappa == o.kappa && N == o.N && torus == o.torus;
  }
};

GridSpec build_grid(int d, double L, int kappa, int N);
// Periodic box of side L with every node treated as interior.
GridSpec build_torus(int d, double L, int N);

void require_same_grid(const GridSpec& a, const GridSpec& b);

struct Field {
  GridSpec grid;
  int components = 1;
  std::vector<double> values;  // component-major: values[c * points + idx]

  Field() = default;
  Field(const GridSpec& g, int comps = 1, double fill = 0.0)
      : grid(g), components(comps), values(g.points() * std::size_t(comps), fill) {}

  static Field scalar(const GridSpec& g, double fill = 0.0) { return Field(g, 1, fill); }
  static Field vector(const GridSpec& g, double fill = 0.0) { return Field(g, g.d, fill); }

  std::size_t points() const { return grid.points(); }
  std::span<double> component(int c) {
    return {values.data() + std::size_t(c) * points(), points()};
  }
  std::span<const double> component(int c) const {
    return {values.data() + std::size_t(c) * points(), points()};
  }
};

// Zero every exterior node.
Field mask_to_interior(const Field& f);
void mask_in_place(Field& f);
void mask_in_place(const GridSpec& g, std::span<double> scalar_values);
bool is_interior_supported(const Field& f, double tol = 0.0);

// Standard normal node values, optionally masked to Omega.
Field random_field(const GridSpec& g, int components, std::uint64_t seed, bool interior_only);

// Discrete L2 pairings with weight dx^d over the extended box.
double inner(const Field& a, const Field& b);
double l2_norm(const Field& f);

// Per-node d x d coefficient matrices stored entry-major:
// entry(p, q) is a points()-long array.
struct MatrixField {
  int d = 1;
  std::size_t points = 0;
  std::vector<double> data;  // (p * d + q) * points + idx

  double* entry(int p, int q) { return data.data() + std::size_t(p * d + q) * points; }
  const double* entry(int p, int q) const {
    return data.data() + std::size_t(p * d + q) * points;
  }
};

struct EllipticBounds {
  double lo = 0.0;  // min over nodes of the smallest eigenvalue of the symmetric part
  double hi = 0.0;  // max over nodes of the operator norm
};

struct CoefficientField {
  GridSpec grid;
  MatrixField A;
  MatrixField B;
  double a_lo = 0.0, a_hi = 0.0, b_lo = 0.0, b_hi = 0.0;
  // Nonzero when the matrix equals this multiple of the identity at every node.
  double A_scalar = 0.0;
  double B_scalar = 0.0;

  static CoefficientField identity(const GridSpec& g, double a = 1.0, double b = 1.0);
  // Builds from explicit per-node matrices; validates ellipticity and B symmetry.
  static CoefficientField from_matrices(const GridSpec& g, MatrixField A, MatrixField B);
};

MatrixField constant_matrix(const GridSpec& g, const std::vector<double>& entries);
MatrixField diagonal_matrix(const GridSpec& g, const std::vector<std::vector<double>>& diag);

MatrixField transpose(const MatrixField& M);

EllipticBounds matrix_bounds(const MatrixField& M);
bool is_symmetric(const MatrixField& M, double tol = 0.0);

struct EllipticityCheck {
  bool pass = true;
  double worst_lower = 0.0;  // min of (M eta . eta) - lo
  double worst_upper = 0.0;  // min of hi |eta||zeta| - M eta . zeta
};

// Sampled check of lo |eta|^2 <= M eta . eta and M eta . zeta <= hi |eta||zeta|.
EllipticityCheck sample_ellipticity(const MatrixField& M, double lo, double hi, int samples,
                                    std::uint64_t seed);

}  // namespace fracwave
