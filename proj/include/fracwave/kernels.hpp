#pragma once

// Data-parallel inner loops used by the spectral operators, the Krylov solver
// and the diagnostics. Every kernel has a scalar reference implementation;
// vectorized variants are selected once per process from the CPU features.
// Set FRACWAVE_KERNELS=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fracwave::kernels {

struct KernelTable {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_abs)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = alpha * x + beta * y
  void (*axpby)(double alpha, const double* x, double beta, double* y, std::size_t n);
  // y = x * w (elementwise)
  void (*hadamard)(const double* x, const double* w, double* y, std::size_t n);

  // Complex arrays are interleaved (re, im) pairs, `nfreq` complex entries.
  // out = i * a * in * scale, with `a` real per frequency.
  void (*mul_i_symbol)(const double* a, const double* in, double* out, std::size_t nfreq,
                       double scale);
  // out += i * a * in * scale
  void (*acc_mul_i_symbol)(const double* a, const double* in, double* out, std::size_t nfreq,
                           double scale);
  // out = w * in * scale, with `w` real per frequency.
  void (*mul_real_symbol)(const double* w, const double* in, double* out, std::size_t nfreq,
                          double scale);

  // Per-node 2x2 matrix times vector: (y0, y1) = M (x0, x1) with M stored as
  // four arrays m00, m01, m10, m11.
  void (*matvec2)(const double* m00, const double* m01, const double* m10, const double* m11,
                  const double* x0, const double* x1, double* y0, double* y1, std::size_t n);

  // Yosida approximation of the indicator of [a, b] and its Newton derivative.
  // Infinite bounds are allowed.
  void (*yosida_interval)(const double* u, double a, double b, double eps, double* out,
                          double* deriv, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_table();

// The table chosen for this process.
const KernelTable& active();

std::vector<const KernelTable*> available_tables();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

inline void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  active().axpby(alpha, x.data(), beta, y.data(), y.size());
}

inline void hadamard(std::span<const double> x, std::span<const double> w, std::span<double> y) {
  active().hadamard(x.data(), w.data(), y.data(), y.size());
}

inline double sum_abs(std::span<const double> a) { return active().sum_abs(a.data(), a.size()); }

}  // namespace fracwave::kernels
