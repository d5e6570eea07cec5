#include "sgdlab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sgdlab::kernels {

namespace detail {

double reduce_sum_scalar(const double* x, std::size_t n) {
  // four lanes, fixed order, to keep rounding behavior stable
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i];
    s1 += x[i + 1];
    s2 += x[i + 2];
    s3 += x[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += x[i];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

double reduce_max_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

double exp_shift_sum_scalar(const double* x, std::size_t n, double shift) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += std::exp(x[i] - shift);
    s1 += std::exp(x[i + 1] - shift);
    s2 += std::exp(x[i + 2] - shift);
    s3 += std::exp(x[i + 3] - shift);
  }
  double tail = 0;
  for (; i < n; ++i) tail += std::exp(x[i] - shift);
  return ((s0 + s1) + (s2 + s3)) + tail;
}

double sup_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }
#else
bool cpu_has_avx2() { return false; }
#endif

#if defined(__x86_64__) || defined(_M_X64)
// defined in kernels_avx2.cpp
double reduce_sum_avx2(const double*, std::size_t);
double reduce_max_avx2(const double*, std::size_t);
double dot_avx2(const double*, const double*, std::size_t);
double exp_shift_sum_avx2(const double*, std::size_t, double);
double sup_abs_diff_avx2(const double*, const double*, std::size_t);
#else
// never selected off x86; keep the dispatch table linkable
double reduce_sum_avx2(const double* x, std::size_t n) { return reduce_sum_scalar(x, n); }
double reduce_max_avx2(const double* x, std::size_t n) { return reduce_max_scalar(x, n); }
double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
double exp_shift_sum_avx2(const double* x, std::size_t n, double shift) {
  return exp_shift_sum_scalar(x, n, shift);
}
double sup_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  return sup_abs_diff_scalar(a, b, n);
}
#endif

}  // namespace detail

namespace {
Backend g_backend = detail::cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !detail::cpu_has_avx2()) return;
  g_backend = b;
}

double reduce_sum(const double* x, std::size_t n) {
  return g_backend == Backend::avx2 ? detail::reduce_sum_avx2(x, n)
                                    : detail::reduce_sum_scalar(x, n);
}

double reduce_max(const double* x, std::size_t n) {
  return g_backend == Backend::avx2 ? detail::reduce_max_avx2(x, n)
                                    : detail::reduce_max_scalar(x, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return g_backend == Backend::avx2 ? detail::dot_avx2(a, b, n)
                                    : detail::dot_scalar(a, b, n);
}

double exp_shift_sum(const double* x, std::size_t n, double shift) {
  return g_backend == Backend::avx2 ? detail::exp_shift_sum_avx2(x, n, shift)
                                    : detail::exp_shift_sum_scalar(x, n, shift);
}

double sup_abs_diff(const double* a, const double* b, std::size_t n) {
  return g_backend == Backend::avx2 ? detail::sup_abs_diff_avx2(a, b, n)
                                    : detail::sup_abs_diff_scalar(a, b, n);
}

double logsumexp(const double* x, std::size_t n) {
  const double m = reduce_max(x, n);
  if (!std::isfinite(m)) return m;
  return m + std::log(exp_shift_sum(x, n, m));
}

}  // namespace sgdlab::kernels
