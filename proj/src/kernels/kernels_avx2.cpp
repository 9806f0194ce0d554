// AVX2 + FMA variants. Tails shorter than one register fall back to the
// scalar reference loops so both paths agree on every element they share.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace fracwave::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [a0, a0, a1, a1] from two consecutive symbol entries.
inline __m256d spread_pair(const double* a) {
  const __m256d p = _mm256_castpd128_pd256(_mm_loadu_pd(a));
  return _mm256_permute4x64_pd(p, 0b01010000);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  }
  return hsum(_mm256_add_pd(s0, s1)) + scalar::dot(a + i, b + i, n - i);
}

double sum_abs(const double* a, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s = _mm256_add_pd(s, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
  }
  return hsum(s) + scalar::sum_abs(a + i, n - i);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d al = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(al, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  scalar::axpy(alpha, x + i, y + i, n - i);
}

void axpby(double alpha, const double* x, double beta, double* y, std::size_t n) {
  const __m256d al = _mm256_set1_pd(alpha);
  const __m256d be = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d by = _mm256_mul_pd(be, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(al, _mm256_loadu_pd(x + i), by));
  }
  scalar::axpby(alpha, x + i, beta, y + i, n - i);
}

void hadamard(const double* x, const double* w, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(w + i)));
  }
  scalar::hadamard(x + i, w + i, y + i, n - i);
}

void mul_i_symbol(const double* a, const double* in, double* out, std::size_t nfreq,
                  double scale) {
  // i * a * (re + i im) = (-a im) + i (a re)
  const __m256d sgn = _mm256_set_pd(scale, -scale, scale, -scale);
  std::size_t k = 0;
  for (; k + 2 <= nfreq; k += 2) {
    const __m256d z = _mm256_loadu_pd(in + 2 * k);
    const __m256d swapped = _mm256_permute_pd(z, 0b0101);
    const __m256d ak = _mm256_mul_pd(spread_pair(a + k), sgn);
    _mm256_storeu_pd(out + 2 * k, _mm256_mul_pd(ak, swapped));
  }
  scalar::mul_i_symbol(a + k, in + 2 * k, out + 2 * k, nfreq - k, scale);
}

void acc_mul_i_symbol(const double* a, const double* in, double* out, std::size_t nfreq,
                      double scale) {
  const __m256d sgn = _mm256_set_pd(scale, -scale, scale, -scale);
  std::size_t k = 0;
  for (; k + 2 <= nfreq; k += 2) {
    const __m256d z = _mm256_loadu_pd(in + 2 * k);
    const __m256d swapped = _mm256_permute_pd(z, 0b0101);
    const __m256d ak = _mm256_mul_pd(spread_pair(a + k), sgn);
    _mm256_storeu_pd(out + 2 * k, _mm256_fmadd_pd(ak, swapped, _mm256_loadu_pd(out + 2 * k)));
  }
  scalar::acc_mul_i_symbol(a + k, in + 2 * k, out + 2 * k, nfreq - k, scale);
}

void mul_real_symbol(const double* w, const double* in, double* out, std::size_t nfreq,
                     double scale) {
  const __m256d sc = _mm256_set1_pd(scale);
  std::size_t k = 0;
  for (; k + 2 <= nfreq; k += 2) {
    const __m256d wk = _mm256_mul_pd(spread_pair(w + k), sc);
    _mm256_storeu_pd(out + 2 * k, _mm256_mul_pd(wk, _mm256_loadu_pd(in + 2 * k)));
  }
  scalar::mul_real_symbol(w + k, in + 2 * k, out + 2 * k, nfreq - k, scale);
}

void matvec2(const double* m00, const double* m01, const double* m10, const double* m11,
             const double* x0, const double* x1, double* y0, double* y1, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x0 + i);
    const __m256d b = _mm256_loadu_pd(x1 + i);
    const __m256d r0 =
        _mm256_fmadd_pd(_mm256_loadu_pd(m01 + i), b, _mm256_mul_pd(_mm256_loadu_pd(m00 + i), a));
    const __m256d r1 =
        _mm256_fmadd_pd(_mm256_loadu_pd(m11 + i), b, _mm256_mul_pd(_mm256_loadu_pd(m10 + i), a));
    _mm256_storeu_pd(y0 + i, r0);
    _mm256_storeu_pd(y1 + i, r1);
  }
  scalar::matvec2(m00 + i, m01 + i, m10 + i, m11 + i, x0 + i, x1 + i, y0 + i, y1 + i, n - i);
}

void yosida_interval(const double* u, double a, double b, double eps, double* out,
                     double* deriv, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  const __m256d ve = _mm256_set1_pd(eps);
  const __m256d ie = _mm256_set1_pd(1.0 / eps);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(u + i);
    const __m256d above = _mm256_max_pd(_mm256_sub_pd(x, vb), zero);
    const __m256d below = _mm256_min_pd(_mm256_sub_pd(x, va), zero);
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_add_pd(above, below), ve));
    if (deriv) {
      const __m256d outside =
          _mm256_or_pd(_mm256_cmp_pd(x, vb, _CMP_GT_OQ), _mm256_cmp_pd(x, va, _CMP_LT_OQ));
      _mm256_storeu_pd(deriv + i, _mm256_and_pd(outside, ie));
    }
  }
  scalar::yosida_interval(u + i, a, b, eps, out + i, deriv ? deriv + i : nullptr, n - i);
}

}  // namespace fracwave::kernels::avx2

namespace fracwave::kernels {

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{
      "avx2",
      avx2::dot,
      avx2::sum_abs,
      avx2::axpy,
      avx2::axpby,
      avx2::hadamard,
      avx2::mul_i_symbol,
      avx2::acc_mul_i_symbol,
      avx2::mul_real_symbol,
      avx2::matvec2,
      avx2::yosida_interval,
  };
  return table;
}

}  // namespace fracwave::kernels
