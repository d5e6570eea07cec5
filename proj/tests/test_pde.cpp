#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "sgdlab/gibbs.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/pde.hpp"

using namespace sgdlab;

namespace {

std::vector<double> gibbs_nodes(const ScalarField& field, double s, const GridSpec& g) {
  const GridMeasure mu = gibbs::gibbs_on_grid(field, s, g);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rho[i] = mu.density(i);
  return rho;
}

// normalized gaussian density centered at c with std dev w
std::vector<double> gaussian_nodes(const GridSpec& g, double c, double w) {
  std::vector<double> rho(g.size());
  double mass = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i) - c;
    rho[i] = std::exp(-0.5 * x * x / (w * w));
    mass += g.weight(i) * rho[i];
  }
  for (auto& v : rho) v /= mass;
  return rho;
}

}  // namespace

TEST_CASE("input validation of the evolution routine") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec g = GridSpec::line(-3, 3, 201);
  std::vector<double> rho = gibbs_nodes(q, 0.2, g);
  CHECK_THROWS_AS(pde::fp_evolve(q, 0.2, std::vector<double>(17, 0.1), g, 0.01, 1.0),
                  pde::ConfigurationError);
  std::vector<double> heavy = rho;
  for (auto& v : heavy) v *= 1.5;  // mass 1.5
  CHECK_THROWS_AS(pde::fp_evolve(q, 0.2, heavy, g, 0.01, 1.0), pde::ConfigurationError);
  CHECK_THROWS_AS(pde::fp_evolve(q, 0.2, rho, g, -0.01, 1.0), pde::ConfigurationError);
}

TEST_CASE("the equilibrium density is a fixed point of the scheme") {
  // quadratic drift: the face-centered gradient is exact, so the fitted flux
  // vanishes on the equilibrium profile to rounding
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec g = GridSpec::line(-3, 3, 401);
  const std::vector<double> rho = gibbs_nodes(q, 0.2, g);
  const auto snaps = pde::fp_evolve(q, 0.2, rho, g, 0.01, 5.0, 10);
  REQUIRE(snaps.size() == 10);
  double sup = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    sup = std::max(sup, std::fabs(snaps.back().density[i] - rho[i]));
  CHECK(sup < 1e-9);
}

TEST_CASE("evolution from a displaced gaussian matches the closed form") {
  const double theta = 1.0, s = 0.2, t0 = 0.05, t1 = 1.0;
  const ScalarField q = objective::make_quadratic_1d(theta);
  const GridSpec g = GridSpec::line(-4, 4, 801);
  const auto start = pde::ou_closed_form(theta, s, 1.0, t0, g);
  const auto snaps = pde::fp_evolve(q, s, start.density, g, 0.005, t1 - t0, 20);
  const auto exact = pde::ou_closed_form(theta, s, 1.0, t1, g);

  double sup = 0, mean = 0, m2 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    sup = std::max(sup, std::fabs(snaps.back().density[i] - exact.density[i]));
    const double x = g.coord(0, i), w = g.weight(i);
    mean += w * x * snaps.back().density[i];
    m2 += w * x * x * snaps.back().density[i];
  }
  CHECK(sup < 0.02);
  CHECK(mean == doctest::Approx(std::exp(-theta * t1)).epsilon(0.02));
  const double var_exact = 0.5 * s / theta * (1 - std::exp(-2 * theta * t1));
  CHECK(m2 - mean * mean == doctest::Approx(var_exact).epsilon(0.02));
  CHECK_THROWS_AS(pde::ou_closed_form(theta, s, 1.0, -0.1, g), pde::ConfigurationError);
}

TEST_CASE("the weighted norm decays monotonically at twice the spectral gap") {
  const double theta = 1.0, s = 0.25;
  const ScalarField q = objective::make_quadratic_1d(theta);
  const GridSpec g = GridSpec::line(-4, 4, 801);
  const auto fit =
      pde::decay_fit(q, s, gaussian_nodes(g, 0.8, 0.4), g, 0.005, 6.0, theta);
  CHECK(fit.conclusive);
  for (std::size_t i = 1; i < fit.norms.size(); ++i)
    CHECK(fit.norms[i] <= fit.norms[i - 1] * 1.01);
  CHECK(fit.fitted_rate == doctest::Approx(2 * theta).epsilon(0.05));
  CHECK(fit.fit_r2 > 0.999);
  CHECK(fit.excess_rate > 0);
}

TEST_CASE("time to stationarity is finite and censoring is reported") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec g = GridSpec::line(-4, 4, 601);
  const auto rho0 = gaussian_nodes(g, 0.8, 0.4);
  const auto st = pde::time_to_stationarity(q, 0.25, rho0, g, 0.1, 0.005, 20.0);
  CHECK_FALSE(st.censored);
  CHECK(st.time > 0);
  CHECK(st.time < 20.0);
  const auto tight = pde::time_to_stationarity(q, 0.25, rho0, g, 0.1, 0.005, 0.05);
  CHECK(tight.censored);
  CHECK_THROWS_AS(pde::time_to_stationarity(q, 0.25, rho0, g, 1.5, 0.005, 1.0),
                  pde::ConfigurationError);
}

TEST_CASE("variational inequalities hold on randomized smooth test functions") {
  const double theta = 1.0, s = 0.25;
  const ScalarField q = objective::make_quadratic_1d(theta);
  const GridSpec g = GridSpec::line(-4, 4, 801);
  const auto fns = pde::random_bumps(1, 5, 31, 2.0);

  const auto key = pde::key_inequality_check(q, s, fns, g);
  CHECK(key.all_ok);
  REQUIRE(key.margin.size() == fns.size());

  const auto poi = pde::poincare_check(q, s, theta, fns, g);
  CHECK(poi.all_ok);
  for (double m : poi.margin) CHECK(m >= -1e-9);
  CHECK_THROWS_AS(pde::poincare_check(q, s, 0.0, fns, g), pde::ConfigurationError);

  const auto gam = pde::gamma_calculus_check(q, s, fns, g);
  CHECK(gam.curvature_asserted);
  CHECK(gam.all_ok);
}

TEST_CASE("entropy decay, csiszar-kullback and log-sobolev along the flow") {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const GridSpec g = GridSpec::line(-4, 4, 601);
  const auto rep =
      pde::entropy_decay_check(q, 0.25, gaussian_nodes(g, 0.8, 0.4), g, 0.005, 4.0);
  CHECK(rep.ok);
  CHECK(rep.ck_min_margin >= -1e-8);
  CHECK(rep.logsob_min_margin >= -1e-6);
  CHECK(rep.fitted_entropy_rate > 0);
  for (std::size_t i = 1; i < rep.entropy.size(); ++i)
    CHECK(rep.entropy[i] <= rep.entropy[i - 1] * 1.01 + 1e-10);
  // fields without a declared convexity constant are rejected
  const ScalarField dw = objective::catalog("double_well_tilted");
  CHECK_THROWS_AS(
      pde::entropy_decay_check(dw, 0.25, gaussian_nodes(g, 0.0, 0.4), g, 0.005, 1.0),
      pde::ConfigurationError);
}
