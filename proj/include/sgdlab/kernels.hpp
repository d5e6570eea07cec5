#pragma once

#include <cstddef>

// Reduction kernels used by the quadrature and norm code paths.
// A scalar reference implementation is always available; an AVX2 variant is
// selected at runtime when the CPU supports it. Both variants are
// equivalence-tested against each other.

namespace sgdlab::kernels {

enum class Backend { scalar, avx2 };

// Backend chosen at process start (avx2 when supported, else scalar).
Backend active_backend();

// Override the dispatch, e.g. to cross-check backends in tests.
void force_backend(Backend b);

// sum of x[0..n)
double reduce_sum(const double* x, std::size_t n);

// max of x[0..n); n must be >= 1
double reduce_max(const double* x, std::size_t n);

// inner product of a and b
double dot(const double* a, const double* b, std::size_t n);

// sum of exp(x[i] - shift)
double exp_shift_sum(const double* x, std::size_t n, double shift);

// max |a[i] - b[i]|
double sup_abs_diff(const double* a, const double* b, std::size_t n);

// log(sum exp(x[i])), stabilized by the running max; n must be >= 1
double logsumexp(const double* x, std::size_t n);

}  // namespace sgdlab::kernels
