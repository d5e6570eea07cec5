#include <cmath>
#include <vector>

#include <doctest.h>

#include "sgdlab/gibbs.hpp"
#include "sgdlab/objective.hpp"

using namespace sgdlab;

namespace {

// node densities of mu, for the routines that take a raw density vector
std::vector<double> densities(const GridMeasure& mu) {
  std::vector<double> rho(mu.grid.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = mu.density(i);
  return rho;
}

}  // namespace

TEST_CASE("partition function and normalization of the gaussian measure") {
  // e^{-2f/s} = e^{-x^2/s} integrates to sqrt(pi s)
  const ScalarField q = objective::make_quadratic_1d(1.0);
  for (double s : {0.1, 0.3, 0.7}) {
    const GridMeasure mu = gibbs::gibbs_on_grid(q, s, GridSpec::line(-5, 5, 4001));
    CHECK(mu.Z_s == doctest::Approx(std::sqrt(M_PI * s)).epsilon(1e-6));
    CHECK(mu.integrate([](const Point&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
    // second moment of N(0, s/2)
    CHECK(mu.integrate([](const Point& p) { return p[0] * p[0]; }) ==
          doctest::Approx(0.5 * s).epsilon(1e-6));
  }
}

TEST_CASE("a box with visible boundary mass is rejected") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  CHECK_THROWS_AS(gibbs::gibbs_on_grid(q, 0.5, GridSpec::line(-0.5, 0.5, 101)),
                  gibbs::TruncationError);
  const GridSpec box = gibbs::default_box(q, 0.5, 801);
  CHECK_NOTHROW(gibbs::gibbs_on_grid(q, 0.5, box));
}

TEST_CASE("stationary excess risk is linear in the temperature") {
  const GridSpec line = GridSpec::line(-4, 4, 2001);
  const ScalarField q1 = objective::make_quadratic_1d(1.0);
  const ScalarField q3 = objective::make_quadratic_1d(3.0);
  for (double s : {0.1, 0.2, 0.4}) {
    CHECK(gibbs::epsilon_of_s(q1, s, line) == doctest::Approx(s / 4).epsilon(1e-6));
    // the slope s/4 is curvature-free: any 1d quadratic gives the same value
    CHECK(gibbs::epsilon_of_s(q3, s, line) == doctest::Approx(s / 4).epsilon(1e-6));
  }
  const ScalarField q2 = objective::catalog("quadratic_2d_paper");
  const GridSpec box = GridSpec::box(-14, 14, -18, 18, 501, 501);
  CHECK(gibbs::epsilon_of_s(q2, 0.2, box) == doctest::Approx(0.1).epsilon(1e-5));
}

TEST_CASE("temperature derivative of the excess risk matches finite differences") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const GridSpec line = GridSpec::line(-3, 3, 3001);
  const double s = 0.3, h = 1e-4;
  const double fd =
      (gibbs::epsilon_of_s(dw, s + h, line) - gibbs::epsilon_of_s(dw, s - h, line)) / (2 * h);
  CHECK(gibbs::epsilon_derivative(dw, s, line) == doctest::Approx(fd).epsilon(1e-5));
  // quadratic: epsilon = s/4, so the derivative is 1/4
  const ScalarField q = objective::make_quadratic_1d(1.0);
  CHECK(gibbs::epsilon_derivative(q, 0.2, GridSpec::line(-4, 4, 2001)) ==
        doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("root mean square excess risk of the gaussian measure") {
  // E (f - f*)^2 = 3 s^2 / 16, so C(s) = sqrt(3) s / 4
  const ScalarField q = objective::make_quadratic_1d(1.0);
  for (double s : {0.1, 0.5})
    CHECK(gibbs::c_of_s(q, s, GridSpec::line(-4, 4, 2001)) ==
          doctest::Approx(std::sqrt(3.0) * s / 4).epsilon(1e-6));
}

TEST_CASE("weighted distance vanishes on the measure itself") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const GridMeasure mu = gibbs::gibbs_on_grid(dw, 0.3, GridSpec::line(-3, 3, 1001));
  CHECK(gibbs::weighted_l2_distance(densities(mu), mu) < 1e-7);
}

TEST_CASE("weighted distance between two gaussian temperatures, against quadrature") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec line = GridSpec::line(-5, 5, 4001);
  const double s1 = 0.3, s2 = 0.2;
  const GridMeasure mu1 = gibbs::gibbs_on_grid(q, s1, line);
  const GridMeasure mu2 = gibbs::gibbs_on_grid(q, s2, line);
  // independent trapezoid oracle for integral of rho^2/mu - 1
  double acc = 0;
  for (std::size_t i = 0; i < line.size(); ++i)
    acc += mu1.density(i) * mu1.density(i) / mu2.density(i) * line.weight(i);
  const double oracle = std::sqrt(acc - 1.0);
  CHECK(gibbs::weighted_l2_distance(densities(mu1), mu2) == doctest::Approx(oracle).epsilon(1e-8));
  CHECK(gibbs::cross_norm(q, s1, s2, line) == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("cross-norm input validation") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec line = GridSpec::line(-5, 5, 1001);
  CHECK_THROWS_AS(gibbs::cross_norm(q, 0.2, 0.3, line), std::invalid_argument);
  // s1 >= 2 s2 makes the integrand grow toward the boundary
  CHECK_THROWS_AS(gibbs::cross_norm(q, 0.5, 0.2, line), gibbs::NormOverflowError);
}

TEST_CASE("relative entropy between gaussian temperatures has the closed form") {
  // KL(N(0,a) || N(0,b)) = (a/b - 1 + log(b/a)) / 2 with a = s1/2, b = s2/2
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec line = GridSpec::line(-5, 5, 4001);
  const double s1 = 0.3, s2 = 0.2;
  const GridMeasure mu1 = gibbs::gibbs_on_grid(q, s1, line);
  const GridMeasure mu2 = gibbs::gibbs_on_grid(q, s2, line);
  const double exact = 0.5 * (s1 / s2 - 1.0 + std::log(s2 / s1));
  CHECK(gibbs::relative_entropy(densities(mu1), mu2) == doctest::Approx(exact).epsilon(1e-5));
  CHECK(std::fabs(gibbs::relative_entropy(densities(mu2), mu2)) < 1e-10);
}

TEST_CASE("the gibbs density annihilates the stationary operator") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const double s = 0.25;
  const GridMeasure coarse = gibbs::gibbs_on_grid(dw, s, GridSpec::line(-3, 3, 1001));
  const GridMeasure fine = gibbs::gibbs_on_grid(dw, s, GridSpec::line(-3, 3, 2001));
  const double rc = gibbs::stationarity_residual(dw, coarse);
  const double rf = gibbs::stationarity_residual(dw, fine);
  CHECK(rc / rf == doctest::Approx(4.0).epsilon(0.5));  // second-order stencils
  // a mismatched temperature leaves a macroscopic residual
  GridMeasure wrong = gibbs::gibbs_on_grid(dw, 2 * s, GridSpec::line(-3, 3, 1001));
  wrong.s = s;
  CHECK(gibbs::stationarity_residual(dw, wrong) > 100 * rc);
}
