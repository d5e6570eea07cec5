#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sgdlab/kernels.hpp"

using namespace sgdlab;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar reductions match a long-double reference") {
  kernels::force_backend(kernels::Backend::scalar);
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 16u, 17u, 1001u}) {
    const auto a = random_vec(n, 10 + static_cast<unsigned>(n));
    const auto b = random_vec(n, 90 + static_cast<unsigned>(n));
    long double sum = 0, dp = 0;
    double mx = a[0], sup = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += a[i];
      dp += static_cast<long double>(a[i]) * b[i];
      mx = std::max(mx, a[i]);
      sup = std::max(sup, std::fabs(a[i] - b[i]));
    }
    CHECK(kernels::reduce_sum(a.data(), n) ==
          doctest::Approx(static_cast<double>(sum)).epsilon(1e-13));
    CHECK(kernels::dot(a.data(), b.data(), n) ==
          doctest::Approx(static_cast<double>(dp)).epsilon(1e-13));
    CHECK(kernels::reduce_max(a.data(), n) == mx);
    CHECK(kernels::sup_abs_diff(a.data(), b.data(), n) == sup);
  }
}

TEST_CASE("logsumexp is shift-stable") {
  kernels::force_backend(kernels::Backend::scalar);
  std::vector<double> x{-1000.0, -1000.5, -999.2};
  double direct = 0;
  for (double v : x) direct += std::exp(v + 999.2);
  const double expected = -999.2 + std::log(direct);
  CHECK(kernels::logsumexp(x.data(), x.size()) == doctest::Approx(expected).epsilon(1e-14));

  std::vector<double> tiny{std::log(0.25), std::log(0.75)};
  CHECK(kernels::logsumexp(tiny.data(), 2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("avx2 backend agrees with scalar when available") {
  kernels::force_backend(kernels::Backend::avx2);
  const bool have_avx2 = kernels::active_backend() == kernels::Backend::avx2;
  if (!have_avx2) {
    // force_backend must refuse the unavailable backend rather than crash
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    return;
  }
  for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 13u, 64u, 257u, 4096u}) {
    const auto a = random_vec(n, 3 + static_cast<unsigned>(n));
    const auto b = random_vec(n, 7 + static_cast<unsigned>(n));

    kernels::force_backend(kernels::Backend::scalar);
    const double s_sum = kernels::reduce_sum(a.data(), n);
    const double s_max = kernels::reduce_max(a.data(), n);
    const double s_dot = kernels::dot(a.data(), b.data(), n);
    const double s_exp = kernels::exp_shift_sum(a.data(), n, s_max);
    const double s_sup = kernels::sup_abs_diff(a.data(), b.data(), n);

    kernels::force_backend(kernels::Backend::avx2);
    CHECK(kernels::reduce_sum(a.data(), n) == doctest::Approx(s_sum).epsilon(1e-13));
    CHECK(kernels::reduce_max(a.data(), n) == s_max);
    CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(s_dot).epsilon(1e-13));
    CHECK(kernels::exp_shift_sum(a.data(), n, s_max) ==
          doctest::Approx(s_exp).epsilon(1e-12));
    CHECK(kernels::sup_abs_diff(a.data(), b.data(), n) == s_sup);
  }
  kernels::force_backend(kernels::Backend::scalar);
}
