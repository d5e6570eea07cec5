#include <cmath>

#include <doctest.h>

#include "sgdlab/noise.hpp"

using namespace sgdlab;

TEST_CASE("draws are a pure function of the index tuple") {
  const NoiseModel a{123, 4};
  const NoiseModel b{123, 4};
  CHECK(a.gaussian(17, 0) == b.gaussian(17, 0));
  CHECK(a.uniform(17, 1) == b.uniform(17, 1));
  // any index change decorrelates
  CHECK(a.gaussian(17, 0) != a.gaussian(18, 0));
  CHECK(a.gaussian(17, 0) != a.gaussian(17, 1));
  CHECK(a.gaussian(17, 0) != NoiseModel{123, 5}.gaussian(17, 0));
  CHECK(a.gaussian(17, 0) != NoiseModel{124, 4}.gaussian(17, 0));
}

TEST_CASE("uniforms live in the open unit interval") {
  const NoiseModel n{9, 0};
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double u = n.uniform(k, 0);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("gaussian moments") {
  const NoiseModel n{2024, 0};
  const int N = 200000;
  double sum = 0, sq = 0, cube = 0;
  for (int k = 0; k < N; ++k) {
    const double g = n.gaussian(static_cast<std::uint64_t>(k), 0);
    sum += g;
    sq += g * g;
    cube += g * g * g;
  }
  CHECK(std::fabs(sum / N) < 0.01);
  CHECK(sq / N == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::fabs(cube / N) < 0.05);
}

TEST_CASE("inverse normal cdf hits the standard quantiles") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-10));
  CHECK(inverse_normal_cdf(0.999) == doctest::Approx(3.090232306167814).epsilon(1e-10));
  CHECK(inverse_normal_cdf(0.8413447460685429) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scale rescales draws exactly") {
  NoiseModel unit{7, 1};
  NoiseModel doubled{7, 1};
  doubled.scale = 2.0;
  NoiseModel off{7, 1};
  off.scale = 0.0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    CHECK(doubled.gaussian(k, 0) == 2.0 * unit.gaussian(k, 0));
    CHECK(off.gaussian(k, 0) == 0.0);
  }
}
