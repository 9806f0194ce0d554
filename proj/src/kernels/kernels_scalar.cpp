#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace fracwave::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_abs(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i]);
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby(double alpha, const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

void hadamard(const double* x, const double* w, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] * w[i];
}

void mul_i_symbol(const double* a, const double* in, double* out, std::size_t nfreq,
                  double scale) {
  for (std::size_t k = 0; k < nfreq; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    const double ak = a[k] * scale;
    out[2 * k] = -ak * im;
    out[2 * k + 1] = ak * re;
  }
}

void acc_mul_i_symbol(const double* a, const double* in, double* out, std::size_t nfreq,
                      double scale) {
  for (std::size_t k = 0; k < nfreq; ++k) {
    const double re = in[2 * k];
    const double im = in[2 * k + 1];
    const double ak = a[k] * scale;
    out[2 * k] += -ak * im;
    out[2 * k + 1] += ak * re;
  }
}

void mul_real_symbol(const double* w, const double* in, double* out, std::size_t nfreq,
                     double scale) {
  for (std::size_t k = 0; k < nfreq; ++k) {
    const double wk = w[k] * scale;
    out[2 * k] = wk * in[2 * k];
    out[2 * k + 1] = wk * in[2 * k + 1];
  }
}

void matvec2(const double* m00, const double* m01, const double* m10, const double* m11,
             const double* x0, const double* x1, double* y0, double* y1, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x0[i];
    const double b = x1[i];
    y0[i] = m00[i] * a + m01[i] * b;
    y1[i] = m10[i] * a + m11[i] * b;
  }
}

void yosida_interval(const double* u, double a, double b, double eps, double* out,
                     double* deriv, std::size_t n) {
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < n; ++i) {
    const double above = std::max(u[i] - b, 0.0);
    const double below = std::min(u[i] - a, 0.0);
    out[i] = (above + below) / eps;
    if (deriv) deriv[i] = (u[i] > b || u[i] < a) ? inv_eps : 0.0;
  }
}

}  // namespace fracwave::kernels::scalar

namespace fracwave::kernels {

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",
      scalar::dot,
      scalar::sum_abs,
      scalar::axpy,
      scalar::axpby,
      scalar::hadamard,
      scalar::mul_i_symbol,
      scalar::acc_mul_i_symbol,
      scalar::mul_real_symbol,
      scalar::matvec2,
      scalar::yosida_interval,
  };
  return table;
}

}  // namespace fracwave::kernels
