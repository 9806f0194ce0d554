#include "fracwave/frac_ops.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "fracwave/kernels.hpp"

namespace fracwave {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwPtr = std::unique_ptr<T[], FftwFree>;

FftwPtr<double> alloc_real(std::size_t n) {
  return FftwPtr<double>(static_cast<double*>(fftw_malloc(sizeof(double) * std::max<std::size_t>(n, 1))));
}

FftwPtr<fftw_complex> alloc_complex(std::size_t n) {
  return FftwPtr<fftw_complex>(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1))));
}

int signed_wavenumber(int j, int N) { return j <= N / 2 ? j : j - N; }

}  // namespace

struct RieszOperator::Impl {
  GridSpec grid;
  double s = 1.0;
  std::size_t npts = 0;
  std::size_t nfreq = 0;
  double scale = 1.0;  // 1 / N^d
  std::vector<double> factor;     // d * nfreq
  std::vector<double> composite;  // nfreq
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  double axis_factor(int kc, int kx, int ky, int N) const {
    if (N % 2 == 0 && std::abs(kc) == N / 2) return 0.0;
    const double box = grid.box();
    const double wx = 2.0 * M_PI * kx / box;
    const double wy = 2.0 * M_PI * ky / box;
    const double mag = std::sqrt(wx * wx + wy * wy);
    if (mag == 0.0) return 0.0;
    const double wc = 2.0 * M_PI * kc / box;
    if (s == 1.0) return wc;
    return wc * std::pow(mag, s - 1.0);
  }

  void fft(const double* in, fftw_complex* out) const {
    fftw_execute_dft_r2c(forward, const_cast<double*>(in), out);
  }
  // Destroys `in`.
  void ifft(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(backward, in, out); }
};

RieszOperator::RieszOperator(const GridSpec& grid, double s) {
  if (!(s > 0.0) || s > 1.0) throw DomainError("s must lie in (0,1]");
  auto impl = std::make_shared<Impl>();
  impl->grid = grid;
  impl->s = s;
  const int N = grid.N;
  const int half = N / 2 + 1;
  impl->npts = grid.points();
  impl->nfreq = grid.d == 1 ? std::size_t(half) : std::size_t(N) * std::size_t(half);
  impl->scale = 1.0 / double(impl->npts);
  impl->factor.assign(std::size_t(grid.d) * impl->nfreq, 0.0);
  impl->composite.assign(impl->nfreq, 0.0);
  for (std::size_t f = 0; f < impl->nfreq; ++f) {
    int kx = 0, ky = 0;
    if (grid.d == 1) {
      kx = int(f);
    } else {
      kx = int(f % std::size_t(half));
      ky = signed_wavenumber(int(f / std::size_t(half)), N);
    }
    double sum = 0.0;
    for (int c = 0; c < grid.d; ++c) {
      const double a = impl->axis_factor(c == 0 ? kx : ky, kx, ky, N);
      impl->factor[std::size_t(c) * impl->nfreq + f] = a;
      sum += a * a;
    }
    impl->composite[f] = sum;
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto r = alloc_real(impl->npts);
    auto c = alloc_complex(impl->nfreq);
    const unsigned flags = FFTW_ESTIMATE;
    if (grid.d == 1) {
      impl->forward = fftw_plan_dft_r2c_1d(N, r.get(), c.get(), flags);
      impl->backward = fftw_plan_dft_c2r_1d(N, c.get(), r.get(), flags);
    } else {
      impl->forward = fftw_plan_dft_r2c_2d(N, N, r.get(), c.get(), flags);
      impl->backward = fftw_plan_dft_c2r_2d(N, N, c.get(), r.get(), flags);
    }
  }
  if (!impl->forward || !impl->backward) throw std::runtime_error("FFT planning failed");
  impl_ = std::move(impl);
}

double RieszOperator::s() const { return impl_->s; }
const GridSpec& RieszOperator::grid() const { return impl_->grid; }
std::size_t RieszOperator::frequencies() const { return impl_->nfreq; }

std::complex<double> RieszOperator::symbol(int c, int kx, int ky) const {
  if (c < 0 || c >= impl_->grid.d) throw DomainError("component out of range");
  const int N = impl_->grid.N;
  if (impl_->grid.d == 1) ky = 0;
  return {0.0, impl_->axis_factor(c == 0 ? kx : ky, kx, ky, N)};
}

std::span<const double> RieszOperator::symbol_factor(int c) const {
  return {impl_->factor.data() + std::size_t(c) * impl_->nfreq, impl_->nfreq};
}

std::span<const double> RieszOperator::composite_symbol() const { return impl_->composite; }

void RieszOperator::gradient(std::span<const double> u, std::span<double> grad) const {
  const Impl& I = *impl_;
  const auto& K = kernels::active();
  auto uhat = alloc_complex(I.nfreq);
  auto tmp = alloc_complex(I.nfreq);
  auto out = alloc_real(I.npts);
  auto in = alloc_real(I.npts);
  std::copy(u.begin(), u.begin() + I.npts, in.get());
  I.fft(in.get(), uhat.get());
  for (int c = 0; c < I.grid.d; ++c) {
    K.mul_i_symbol(I.factor.data() + std::size_t(c) * I.nfreq, &uhat[0][0], &tmp[0][0], I.nfreq,
                   I.scale);
    I.ifft(tmp.get(), out.get());
    std::copy(out.get(), out.get() + I.npts, grad.begin() + std::size_t(c) * I.npts);
  }
}

void RieszOperator::divergence(std::span<const double> phi, std::span<double> result) const {
  const Impl& I = *impl_;
  const auto& K = kernels::active();
  auto acc = alloc_complex(I.nfreq);
  auto hat = alloc_complex(I.nfreq);
  auto in = alloc_real(I.npts);
  auto out = alloc_real(I.npts);
  std::fill(&acc[0][0], &acc[0][0] + 2 * I.nfreq, 0.0);
  for (int c = 0; c < I.grid.d; ++c) {
    std::copy(phi.begin() + std::size_t(c) * I.npts, phi.begin() + std::size_t(c + 1) * I.npts,
              in.get());
    I.fft(in.get(), hat.get());
    K.acc_mul_i_symbol(I.factor.data() + std::size_t(c) * I.nfreq, &hat[0][0], &acc[0][0],
                       I.nfreq, I.scale);
  }
  I.ifft(acc.get(), out.get());
  std::copy(out.get(), out.get() + I.npts, result.begin());
}

void RieszOperator::fractional_laplacian(std::span<const double> u, std::span<double> result,
                                         double coef) const {
  const Impl& I = *impl_;
  auto hat = alloc_complex(I.nfreq);
  auto in = alloc_real(I.npts);
  auto out = alloc_real(I.npts);
  std::copy(u.begin(), u.begin() + I.npts, in.get());
  I.fft(in.get(), hat.get());
  kernels::active().mul_real_symbol(I.composite.data(), &hat[0][0], &hat[0][0], I.nfreq,
                                    coef * I.scale);
  I.ifft(hat.get(), out.get());
  std::copy(out.get(), out.get() + I.npts, result.begin());
}

void RieszOperator::shifted_inverse(std::span<const double> u, std::span<double> result,
                                    double c0, double c1) const {
  if (!(c0 > 0.0) || c1 < 0.0) throw DomainError("shifted inverse needs c0 > 0 and c1 >= 0");
  const Impl& I = *impl_;
  auto hat = alloc_complex(I.nfreq);
  auto in = alloc_real(I.npts);
  auto out = alloc_real(I.npts);
  std::vector<double> w(I.nfreq);
  for (std::size_t f = 0; f < I.nfreq; ++f) w[f] = 1.0 / (c0 + c1 * I.composite[f]);
  std::copy(u.begin(), u.begin() + I.npts, in.get());
  I.fft(in.get(), hat.get());
  kernels::active().mul_real_symbol(w.data(), &hat[0][0], &hat[0][0], I.nfreq, I.scale);
  I.ifft(hat.get(), out.get());
  std::copy(out.get(), out.get() + I.npts, result.begin());
}

Field RieszOperator::gradient(const Field& u) const {
  require_same_grid(u.grid, grid());
  if (u.components != 1) throw DomainError("gradient expects a scalar field");
  Field g = Field::vector(grid());
  gradient(u.values, g.values);
  return g;
}

Field RieszOperator::divergence(const Field& phi) const {
  require_same_grid(phi.grid, grid());
  if (phi.components != grid().d) throw DomainError("divergence expects a vector field");
  Field out = Field::scalar(grid());
  divergence(phi.values, out.values);
  return out;
}

RieszOperator build_riesz(const GridSpec& grid, double s) { return RieszOperator(grid, s); }

EllipticOperator::EllipticOperator(RieszOperator riesz, MatrixField coeff, double scalar_multiple)
    : riesz_(std::move(riesz)),
      coeff_(std::make_shared<const MatrixField>(std::move(coeff))),
      scalar_(scalar_multiple) {
  if (coeff_->d != riesz_.grid().d || coeff_->points != riesz_.grid().points())
    throw DomainError("coefficient field does not match the operator grid");
}

void EllipticOperator::apply_matrix(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = coeff_->points;
  const auto& K = kernels::active();
  if (coeff_->d == 1) {
    K.hadamard(in.data(), coeff_->entry(0, 0), out.data(), n);
    return;
  }
  K.matvec2(coeff_->entry(0, 0), coeff_->entry(0, 1), coeff_->entry(1, 0), coeff_->entry(1, 1),
            in.data(), in.data() + n, out.data(), out.data() + n, n);
}

void EllipticOperator::apply(std::span<const double> u, std::span<double> out) const {
  const GridSpec& g = grid();
  if (scalar_ != 0.0) {
    riesz_.fractional_laplacian(u, out, scalar_);
  } else {
    const std::size_t n = g.points();
    std::vector<double> grad(std::size_t(g.d) * n), flux(std::size_t(g.d) * n);
    riesz_.gradient(u, grad);
    apply_matrix(grad, flux);
    riesz_.divergence(flux, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = -out[i];
  }
  mask_in_place(g, out);
}

Field EllipticOperator::apply(const Field& u) const {
  require_same_grid(u.grid, grid());
  if (u.components != 1) throw DomainError("elliptic operator expects a scalar field");
  Field out = Field::scalar(grid());
  apply(u.values, out.values);
  return out;
}

double EllipticOperator::pairing(const Field& u, const Field& w) const {
  require_same_grid(u.grid, grid());
  require_same_grid(w.grid, grid());
  const Field gu = riesz_.gradient(u);
  const Field gw = riesz_.gradient(w);
  Field flux = Field::vector(grid());
  apply_matrix(gu.values, flux.values);
  return inner(flux, gw);
}

EllipticOperator make_operator_A(const RieszOperator& riesz, const CoefficientField& coeffs) {
  require_same_grid(coeffs.grid, riesz.grid());
  return EllipticOperator(riesz, coeffs.A, coeffs.A_scalar);
}

EllipticOperator make_operator_B(const RieszOperator& riesz, const CoefficientField& coeffs) {
  require_same_grid(coeffs.grid, riesz.grid());
  return EllipticOperator(riesz, coeffs.B, coeffs.B_scalar);
}

Field apply_elliptic(const EllipticOperator& op, const Field& u) { return op.apply(u); }

Norms norms(const Field& f, const RieszOperator& op) {
  require_same_grid(f.grid, op.grid());
  if (f.components != 1) throw DomainError("norms expect a scalar field");
  return {l2_norm(f), l2_norm(op.gradient(f))};
}

double poincare_ratio(const Field& u, const RieszOperator& op) {
  const Norms n = norms(u, op);
  if (n.l2 == 0.0) throw DomainError("poincare ratio of the zero field");
  return n.l2 / n.hs_semi;
}

double calibrate_poincare_constant(const GridSpec& grid, double s, int samples,
                                   std::uint64_t seed) {
  const RieszOperator op(grid, s);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Field u = random_field(grid, 1, seed + std::uint64_t(k), true);
    worst = std::max(worst, s * poincare_ratio(u, op));
  }
  return worst;
}

GradientLimitProbe gradient_limit_probe(const Field& u, const std::vector<double>& s_list) {
  if (s_list.empty()) throw DomainError("empty exponent list");
  if (u.components != 1) throw DomainError("probe expects a scalar field");
  GradientLimitProbe out;
  const Field du = RieszOperator(u.grid, 1.0).gradient(u);
  out.reference = l2_norm(du);
  for (double s : s_list) {
    Field diff = RieszOperator(u.grid, s).gradient(u);
    kernels::axpy(-1.0, du.values, diff.values);
    out.errors.push_back(l2_norm(diff));
  }
  return out;
}

double fractional_laplacian_constant(int d, double s) {
  if (!(s > 0.0) || !(s < 1.0)) throw DomainError("normalising constant needs s in (0,1)");
  return std::pow(4.0, s) * std::tgamma(0.5 * d + s) /
         (std::pow(M_PI, 0.5 * d) * std::abs(std::tgamma(-s)));
}

}  // namespace fracwave
