#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "sgdlab/morse.hpp"
#include "sgdlab/objective.hpp"

using namespace sgdlab;

namespace {

// independent root finder for f' on a sign-change bracket
double bisect_gradient_root(const ScalarField& f, double a, double b) {
  double ga = f.gradient(point1(a))[0];
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double gm = f.gradient(point1(m))[0];
    if ((ga < 0) == (gm < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

morse::MorseReport report_of(const ScalarField& f, const GridSpec& g) {
  return morse::labeling(f, morse::find_critical_points(f, g), g);
}

}  // namespace

TEST_CASE("tilted double well: full landscape decomposition") {
  const ScalarField f = objective::catalog("double_well_tilted");
  const GridSpec g = GridSpec::line(-2, 2, 401);
  const auto rep = report_of(f, g);

  REQUIRE(rep.minima.size() == 2);
  REQUIRE(rep.saddles_index1.size() == 1);
  REQUIRE(rep.separating_saddles.size() == 1);
  CHECK(rep.generic);

  // bisection oracle for the three roots of f'
  const double m_lo = bisect_gradient_root(f, -1.5, -0.8);
  const double sad = bisect_gradient_root(f, 0.0, 0.6);
  const double m_hi = bisect_gradient_root(f, 0.6, 1.2);
  CHECK(rep.saddles_index1[0].location[0] == doctest::Approx(sad).epsilon(1e-9));

  REQUIRE(rep.pairings.size() == 2);
  CHECK_FALSE(rep.pairings[0].saddle.has_value());  // fictive pair carries the global min
  CHECK(rep.pairings[0].minimum.location[0] == doctest::Approx(m_lo).epsilon(1e-9));
  CHECK(std::isinf(rep.pairings[0].barrier));
  CHECK(rep.pairings[1].minimum.location[0] == doctest::Approx(m_hi).epsilon(1e-9));
  const double H = f.value(point1(sad)) - f.value(point1(m_hi));
  CHECK(rep.pairings[1].barrier == doctest::Approx(H).epsilon(1e-9));
  CHECK(morse::barrier(rep) == doctest::Approx(H).epsilon(1e-9));
  CHECK(rep.H_f == morse::barrier(rep));
}

TEST_CASE("barriers scale linearly with the objective") {
  ScalarField f = objective::catalog("double_well_tilted");
  const ScalarField base = f;
  f.value = [base](const Point& p) { return 2 * base.value(p); };
  f.gradient = [base](const Point& p) {
    Point g = base.gradient(p);
    g[0] *= 2;
    return g;
  };
  f.hessian = [base](const Point& p) {
    SymMat h = base.hessian(p);
    h.a11 *= 2;
    return h;
  };
  const GridSpec g = GridSpec::line(-2, 2, 401);
  const double h1 = morse::barrier(report_of(objective::catalog("double_well_tilted"), g));
  const double h2 = morse::barrier(report_of(f, g));
  CHECK(h2 == doctest::Approx(2 * h1).epsilon(1e-9));
}

TEST_CASE("three wells with distinct depths order by barrier height") {
  const ScalarField f = objective::catalog("multiwell_1d_generic");
  const GridSpec g = GridSpec::line(-3, 3, 1201);
  const auto rep = report_of(f, g);
  REQUIRE(rep.minima.size() == 3);
  REQUIRE(rep.saddles_index1.size() == 2);
  CHECK(rep.separating_saddles.size() == 2);
  CHECK(rep.generic);

  REQUIRE(rep.pairings.size() == 3);
  CHECK(std::isinf(rep.pairings[0].barrier));
  CHECK(rep.pairings[1].barrier >= rep.pairings[2].barrier);

  // oracle: wells near -2.3, 0, 2.2 and saddles near -1.1, 1.2. Merging from
  // the lowest saddle up, each saddle is charged to the shallower of the two
  // wells it joins: the left saddle sheds the middle well (value 0 beats the
  // deep left well), the right saddle sheds the right well.
  const double sad_l = bisect_gradient_root(f, -2.0, -0.5);
  const double sad_r = bisect_gradient_root(f, 0.5, 2.0);
  const double min_mid = bisect_gradient_root(f, -0.5, 0.5);
  const double min_r = bisect_gradient_root(f, 2.0, 2.8);
  const double b_left = f.value(point1(sad_l)) - f.value(point1(min_mid));
  const double b_right = f.value(point1(sad_r)) - f.value(point1(min_r));
  CHECK(rep.pairings[1].barrier ==
        doctest::Approx(std::max(b_left, b_right)).epsilon(1e-9));
  CHECK(rep.pairings[2].barrier ==
        doctest::Approx(std::min(b_left, b_right)).epsilon(1e-9));
  CHECK(rep.H_f == doctest::Approx(std::max(b_left, b_right)).epsilon(1e-9));
  CHECK(rep.pairings[1].minimum.location[0] == doctest::Approx(min_r).epsilon(1e-8));
  CHECK(rep.pairings[2].minimum.location[0] ==
        doctest::Approx(min_mid).scale(1.0).epsilon(1e-8));
  // each finite pairing reproduces its barrier from the raw landscape values
  for (std::size_t i = 1; i < rep.pairings.size(); ++i) {
    const auto& p = rep.pairings[i];
    CHECK(p.barrier ==
          doctest::Approx(p.saddle->value - p.minimum.value).epsilon(1e-12));
  }
}

TEST_CASE("symmetric wells take the degenerate path") {
  const ScalarField f = objective::catalog("multiwell_1d_degenerate");
  const GridSpec g = GridSpec::line(-2, 2, 401);
  const auto rep = report_of(f, g);
  REQUIRE(rep.minima.size() == 2);
  CHECK_FALSE(rep.generic);
  CHECK_FALSE(rep.degenerate_notes.empty());
  REQUIRE(rep.pairings.size() == 2);
  CHECK(rep.pairings[1].barrier_interval.has_value());
  const auto iv = *rep.pairings[1].barrier_interval;
  CHECK(iv.first <= 0.25);
  CHECK(iv.second >= 0.25);  // the true barrier of (x^2-1)^2/4
  // with one saddle the interval collapses onto the symmetric barrier
  const auto pred = morse::eyring_kramers_predict(f, rep, 0.05, 1);
  CHECK(pred.lo <= pred.hi);
  CHECK(pred.hi == doctest::Approx(0.05 * *rep.pairings[1].gamma *
                                   std::exp(-2.0 * 0.25 / 0.05))
                       .epsilon(1e-9));
}

TEST_CASE("a non-separating saddle contributes no finite barrier") {
  const ScalarField f = objective::catalog("ring_1saddle");
  const GridSpec g = GridSpec::box(-2, 2, -2, 2, 201, 201);
  const auto rep = report_of(f, g);
  CHECK(rep.minima.size() == 1);
  CHECK(rep.saddles_index1.size() == 1);
  CHECK(rep.separating_saddles.empty());
  CHECK(std::isinf(rep.H_f));
  REQUIRE(rep.pairings.size() == 1);
  CHECK_THROWS_AS(morse::barrier(rep), morse::NoBarrierError);
}

TEST_CASE("an inline two-dimensional double well separates at the origin") {
  ScalarField f;
  f.dimension = 2;
  f.name = "inline";
  f.value = [](const Point& p) {
    return p[0] * p[0] * p[0] * p[0] - p[0] * p[0] + p[1] * p[1];
  };
  f.gradient = [](const Point& p) {
    return point2(4 * p[0] * p[0] * p[0] - 2 * p[0], 2 * p[1]);
  };
  f.hessian = [](const Point& p) { return SymMat{12 * p[0] * p[0] - 2, 0, 2}; };
  const GridSpec g = GridSpec::box(-1.5, 1.5, -1.5, 1.5, 151, 151);
  const auto rep = report_of(f, g);
  REQUIRE(rep.minima.size() == 2);
  REQUIRE(rep.separating_saddles.size() == 1);
  CHECK(rep.separating_saddles[0].location[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  // minima at +-1/sqrt(2), f = -1/4, saddle value 0
  CHECK(rep.H_f == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("escape prefactor reduces to the curvature formula in one dimension") {
  const ScalarField f = objective::catalog("double_well_tilted");
  const GridSpec g = GridSpec::line(-2, 2, 401);
  const auto rep = report_of(f, g);
  const auto& p = rep.pairings[1];
  const double a = f.hessian(point1(p.minimum.location[0])).a11;
  const double b = f.hessian(point1(p.saddle->location[0])).a11;
  const double expected = std::sqrt(a * -b) / std::acos(-1.0);
  CHECK(morse::prefactor(f, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(morse::prefactor(f, rep.pairings[0]), std::invalid_argument);

  const double s = 0.05;
  const auto pred = morse::eyring_kramers_predict(f, rep, s, 1);
  CHECK(pred.point());
  CHECK(pred.lo ==
        doctest::Approx(s * expected * std::exp(-2 * p.barrier / s)).epsilon(1e-10));
  CHECK_THROWS_AS(morse::eyring_kramers_predict(f, rep, s, 0), std::invalid_argument);
  CHECK_THROWS_AS(morse::eyring_kramers_predict(f, rep, s, 2), std::invalid_argument);
}
