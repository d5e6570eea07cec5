#include "kernels_detail.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace sgdlab::kernels::detail {

namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

// exp on 4 doubles: n = round(x/ln2), e^x = 2^n * e^r with |r| <= ln2/2,
// e^r by a degree-12 Taylor polynomial (Horner), 2^n injected into the
// exponent bits. Inputs below the underflow cutoff flush to 0; inputs are
// assumed <= 709 (callers subtract the running max first).
__m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d underflow = _mm256_set1_pd(-708.0);

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  // 1/k! for k = 12 down to 2
  const double c[] = {2.08767569878680989792e-09, 2.50521083854417187751e-08,
                      2.75573192239858906526e-07, 2.75573192239858906526e-06,
                      2.48015873015873015873e-05, 1.98412698412698412698e-04,
                      1.38888888888888888889e-03, 8.33333333333333333333e-03,
                      4.16666666666666666667e-02, 1.66666666666666666667e-01,
                      5.00000000000000000000e-01};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int k = 1; k < 11; ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // scale by 2^n
  __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i ni64 = _mm256_cvtepi32_epi64(ni);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni64, _mm256_set1_epi64x(1023)), 52);
  p = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

  __m256d ok = _mm256_cmp_pd(x, underflow, _CMP_GT_OQ);
  return _mm256_and_pd(p, ok);
}

}  // namespace

double reduce_sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double reduce_max_avx2(const double* x, std::size_t n) {
  double m = x[0];
  std::size_t i = 0;
  if (n >= 4) {
    __m256d acc = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    m = hmax(acc);
  }
  for (; i < n; ++i) m = m > x[i] ? m : x[i];
  return m;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double exp_shift_sum_avx2(const double* x, std::size_t n, double shift) {
  const __m256d sh = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), sh)));
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - shift;
    s += d > -708.0 ? std::exp(d) : 0.0;
  }
  return s;
}

double sup_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, _mm256_andnot_pd(signmask, d));
  }
  double m = hmax(acc);
  for (; i < n; ++i) {
    const double d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    m = m > d ? m : d;
  }
  return m;
}

}  // namespace sgdlab::kernels::detail

#else  // non-x86: forward to the scalar kernels so the symbols exist

namespace sgdlab::kernels::detail {

double reduce_sum_avx2(const double* x, std::size_t n) { return reduce_sum_scalar(x, n); }
double reduce_max_avx2(const double* x, std::size_t n) { return reduce_max_scalar(x, n); }
double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
double exp_shift_sum_avx2(const double* x, std::size_t n, double shift) {
  return exp_shift_sum_scalar(x, n, shift);
}
double sup_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  return sup_abs_diff_scalar(a, b, n);
}

}  // namespace sgdlab::kernels::detail

#endif
