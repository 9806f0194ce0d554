#pragma once

#include "fracwave/kernels.hpp"

namespace fracwave::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpby(double alpha, const double* x, double beta, double* y, std::size_t n);
void hadamard(const double* x, const double* w, double* y, std::size_t n);
void mul_i_symbol(const double* a, const double* in, double* out, std::size_t nfreq, double scale);
void acc_mul_i_symbol(const double* a, const double* in, double* out, std::size_t nfreq,
                      double scale);
void mul_real_symbol(const double* w, const double* in, double* out, std::size_t nfreq,
                     double scale);
void matvec2(const double* m00, const double* m01, const double* m10, const double* m11,
             const double* x0, const double* x1, double* y0, double* y1, std::size_t n);
void yosida_interval(const double* u, double a, double b, double eps, double* out,
                     double* deriv, std::size_t n);
}  // namespace scalar

#if defined(FRACWAVE_HAVE_AVX2)
// Defined in kernels_avx2.cpp, which is the only translation unit compiled
// with AVX2/FMA code generation.
const KernelTable& avx2_table_unchecked();
#endif

}  // namespace fracwave::kernels
