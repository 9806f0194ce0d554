#pragma once

// Spectral Riesz fractional gradient on the periodic extended box.
//
// Component c of D^s u has Fourier symbol m_c(xi) = i a_c(xi) with
// a_c(xi) = 2 pi xi_c |2 pi xi|^(s-1), a_c(0) = 0. Along an axis whose
// wavenumber sits at the Nyquist index the component is set to zero so that
// D^s maps real grid functions to real grid functions and the discrete
// divergence is the exact negative adjoint of the gradient.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fracwave/domain.hpp"

namespace fracwave {

class RieszOperator {
 public:
  RieszOperator(const GridSpec& grid, double s);

  double s() const;
  const GridSpec& grid() const;
  // Number of stored (half-spectrum) frequencies.
  std::size_t frequencies() const;

  // Symbol component c at signed integer wavenumbers (kx, ky); xi = k / box.
  std::complex<double> symbol(int c, int kx, int ky = 0) const;
  // Real factor a_c per stored frequency.
  std::span<const double> symbol_factor(int c) const;
  // sum_c a_c^2 per stored frequency, i.e. |2 pi xi|^(2s) off the Nyquist lines.
  std::span<const double> composite_symbol() const;

  Field gradient(const Field& u) const;
  Field divergence(const Field& phi) const;

  // Raw-array forms used inside solvers. `grad` holds d component arrays.
  void gradient(std::span<const double> u, std::span<double> grad) const;
  void divergence(std::span<const double> phi, std::span<double> out) const;
  // out = coef * IFFT(S * FFT(in)), the unmasked -D^s.(coef D^s in).
  void fractional_laplacian(std::span<const double> in, std::span<double> out, double coef) const;
  // out = IFFT(FFT(in) / (c0 + c1 S)); requires c0 > 0.
  void shifted_inverse(std::span<const double> in, std::span<double> out, double c0,
                       double c1) const;

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
};

RieszOperator build_riesz(const GridSpec& grid, double s);

// -D^s.(M D^s u), masked to Omega.
class EllipticOperator {
 public:
  EllipticOperator(RieszOperator riesz, MatrixField coeff, double scalar_multiple);

  const RieszOperator& riesz() const { return riesz_; }
  const GridSpec& grid() const { return riesz_.grid(); }

  Field apply(const Field& u) const;
  void apply(std::span<const double> u, std::span<double> out) const;
  // <M D^s u, D^s w> over the extended box.
  double pairing(const Field& u, const Field& w) const;
  // M applied pointwise to a vector field.
  void apply_matrix(std::span<const double> in, std::span<double> out) const;
  // Nonzero when M is this multiple of the identity everywhere.
  double scalar_multiple() const { return scalar_; }

 private:
  RieszOperator riesz_;
  std::shared_ptr<const MatrixField> coeff_;
  double scalar_ = 0.0;
};

EllipticOperator make_operator_A(const RieszOperator& riesz, const CoefficientField& coeffs);
EllipticOperator make_operator_B(const RieszOperator& riesz, const CoefficientField& coeffs);

Field apply_elliptic(const EllipticOperator& op, const Field& u);

struct Norms {
  double l2 = 0.0;
  double hs_semi = 0.0;
};

Norms norms(const Field& f, const RieszOperator& op);

double poincare_ratio(const Field& u, const RieszOperator& op);

// Maximum of s * ||u|| / ||D^s u|| over an ensemble of random interior fields.
double calibrate_poincare_constant(const GridSpec& grid, double s, int samples,
                                   std::uint64_t seed);

struct GradientLimitProbe {
  std::vector<double> errors;  // ||D^s u - D u|| per s
  double reference = 0.0;      // ||D u||
};

GradientLimitProbe gradient_limit_probe(const Field& u, const std::vector<double>& s_list);

// Normalisation constant 4^s Gamma(d/2 + s) / (pi^(d/2) |Gamma(-s)|).
double fractional_laplacian_constant(int d, double s);

// Direct quadrature of c_{d,s} p.v. int (u(x) - u(y)) / |x - y|^(d + 2s) dy for
// interior-supported u, with the |x - y| < delta part replaced by its
// second-order Taylor term. In 1D the far field is integrated over the whole
// real line; in 2D the lattice sum covers the extended box plus an analytic
// exterior tail.
Field singular_integral_laplacian(const Field& u, double s, double delta);

}  // namespace fracwave
