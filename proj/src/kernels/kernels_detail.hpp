#pragma once

#include <cstddef>

namespace sgdlab::kernels::detail {

double reduce_sum_scalar(const double* x, std::size_t n);
double reduce_max_scalar(const double* x, std::size_t n);
double dot_scalar(const double* a, const double* b, std::size_t n);
double exp_shift_sum_scalar(const double* x, std::size_t n, double shift);
double sup_abs_diff_scalar(const double* a, const double* b, std::size_t n);

double reduce_sum_avx2(const double* x, std::size_t n);
double reduce_max_avx2(const double* x, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
double exp_shift_sum_avx2(const double* x, std::size_t n, double shift);
double sup_abs_diff_avx2(const double* a, const double* b, std::size_t n);

bool cpu_has_avx2();

}  // namespace sgdlab::kernels::detail
