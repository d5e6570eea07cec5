#include <cmath>
#include <vector>

#include <doctest.h>

#include <Eigen/Core>

#include "sgdlab/objective.hpp"
#include "sgdlab/spectral.hpp"

using namespace sgdlab;

TEST_CASE("assembled potential matches the closed form at interior nodes") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const double s = 0.3;
  const auto op = spectral::assemble_witten(dw, s, GridSpec::line(-3, 3, 301));
  REQUIRE(op.potential_values.size() == op.interior_to_node.size());
  for (std::size_t i = 0; i < op.potential_values.size(); ++i) {
    const Point x = op.grid.node(op.interior_to_node[i]);
    // the operator carries s V_s as its zeroth-order coefficient
    CHECK(op.potential_values[i] ==
          doctest::Approx(s * objective::schrodinger_potential(dw, s, x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(spectral::assemble_witten(dw, 0.3, GridSpec::line(-1, 1, 101)),
                  spectral::TruncationError);
}

TEST_CASE("harmonic oscillator levels are multiples of 2 s theta") {
  const double theta = 1.0, s = 0.2;
  const ScalarField q = objective::make_quadratic_1d(theta);
  const auto op = spectral::assemble_witten(q, s, GridSpec::line(-6, 6, 1501));
  const auto sp = spectral::smallest_eigs(op, 3);
  CHECK(std::fabs(sp.eigenvalues[0]) < 1e-5);  // O(h^2) discretization bias
  CHECK(sp.eigenvalues[1] == doctest::Approx(2 * s * theta).epsilon(1e-3));
  CHECK(sp.eigenvalues[2] == doctest::Approx(4 * s * theta).epsilon(1e-3));
  // spectral gap over 2s recovers the curvature
  CHECK(sp.lambda_s == doctest::Approx(theta).epsilon(1e-3));
  REQUIRE(sp.zeta.size() == 3);
  CHECK(sp.zeta[1] == doctest::Approx(sp.eigenvalues[1] / s));
}

TEST_CASE("shift-invert iteration agrees with the dense eigensolver") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const double s = 0.25;
  const auto op = spectral::assemble_witten(dw, s, GridSpec::line(-2.8, 2.8, 1201));
  const auto lan = spectral::smallest_eigs(op, 4);
  const auto dense = spectral::smallest_eigs_dense(op, 4);
  const double scale = std::fabs(dense.eigenvalues[3]);
  for (int i = 0; i < 4; ++i)
    CHECK(std::fabs(lan.eigenvalues[i] - dense.eigenvalues[i]) < 1e-10 * scale);
  CHECK(lan.lambda_s == doctest::Approx(dense.lambda_s).epsilon(1e-9));
}

TEST_CASE("the boltzmann profile is the ground state") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const double s = 0.25;
  const auto op = spectral::assemble_witten(dw, s, GridSpec::line(-2.8, 2.8, 1201));
  const auto sp = spectral::smallest_eigs(op, 3);
  CHECK(spectral::ground_state_check(dw, op, sp) < 1e-6);
  // e^{-f/s} on the interior nodes is annihilated up to discretization error
  const std::size_t n = op.interior_to_node.size();
  std::vector<double> g(n);
  double nrm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(-dw.value(op.grid.node(op.interior_to_node[i])) / s);
    nrm += g[i] * g[i];
  }
  nrm = std::sqrt(nrm);
  Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(n));
  const double residual = (op.matrix * gv).norm() / nrm;
  CHECK(residual < 1e-4);
}

TEST_CASE("eigensolver argument validation") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const auto big = spectral::assemble_witten(q, 0.2, GridSpec::line(-6, 6, 2501));
  CHECK_THROWS_AS(spectral::smallest_eigs_dense(big, 3), spectral::SolverError);
  CHECK_THROWS_AS(spectral::smallest_eigs(big, 1), std::invalid_argument);
}

TEST_CASE("low-temperature gap follows the barrier exponential") {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const auto fit = spectral::exp_law_fit(dw, {0.025, 0.02, 0.016, 0.014},
                                         spectral::GridPolicy{2500, 2.0});
  const double H = 0.025221335518885432;  // largest separating barrier of this landscape
  CHECK(fit.slope == doctest::Approx(-2 * H).epsilon(0.05));
  CHECK(fit.r2 > 0.999);
  CHECK_THROWS_AS(spectral::exp_law_fit(dw, {0.02, 0.016, 0.014}, spectral::GridPolicy{}),
                  std::invalid_argument);
}
