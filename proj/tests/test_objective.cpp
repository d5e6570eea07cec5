#include <cmath>
#include <random>

#include <doctest.h>

#include "sgdlab/objective.hpp"

using namespace sgdlab;

namespace {

// central finite differences as the independent derivative oracle
Point fd_gradient(const ScalarField& f, const Point& x, double h = 1e-6) {
  Point g{0, 0};
  for (int c = 0; c < f.dimension; ++c) {
    Point p = x, m = x;
    p[c] += h;
    m[c] -= h;
    g[c] = (f.value(p) - f.value(m)) / (2 * h);
  }
  return g;
}

SymMat fd_hessian(const ScalarField& f, const Point& x, double h = 1e-5) {
  const auto at = [&](double dx, double dy) {
    return f.value({x[0] + dx, x[1] + dy});
  };
  SymMat m;
  m.a11 = (at(h, 0) - 2 * at(0, 0) + at(-h, 0)) / (h * h);
  if (f.dimension == 2) {
    m.a22 = (at(0, h) - 2 * at(0, 0) + at(0, -h)) / (h * h);
    m.a12 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  }
  return m;
}

double bisect_root(const std::function<double(double)>& g, double lo, double hi) {
  double flo = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi), fm = g(mid);
    if (flo * fm <= 0) hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("catalog derivatives agree with finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& name : objective::catalog_names()) {
    const ScalarField f = objective::catalog(name);
    for (int probe = 0; probe < 100; ++probe) {
      const Point x{u(rng), f.dimension == 2 ? u(rng) : 0.0};
      const Point g = f.gradient(x), gfd = fd_gradient(f, x);
      const SymMat h = f.hessian(x), hfd = fd_hessian(f, x);
      for (int c = 0; c < f.dimension; ++c)
        CHECK(g[c] == doctest::Approx(gfd[c]).epsilon(1e-5).scale(1.0));
      CHECK(h.a11 == doctest::Approx(hfd.a11).epsilon(1e-3).scale(1.0));
      if (f.dimension == 2) {
        CHECK(h.a22 == doctest::Approx(hfd.a22).epsilon(1e-3).scale(1.0));
        CHECK(h.a12 == doctest::Approx(hfd.a12).epsilon(1e-3).scale(1.0));
      }
    }
  }
}

TEST_CASE("catalog naming") {
  CHECK_THROWS_AS((void)objective::catalog("no_such_entry"), objective::CatalogError);
  CHECK_THROWS_AS((void)objective::catalog("quadratic_1d(-1)"), objective::CatalogError);
  const ScalarField f = objective::catalog("quadratic_1d(2.5)");
  CHECK(f.gradient(point1(2.0))[0] == doctest::Approx(5.0));
  CHECK(*f.strong_convexity_mu == doctest::Approx(2.5));
  CHECK(objective::catalog_names().size() == 7);
}

TEST_CASE("convexity declarations") {
  CHECK(*objective::catalog("quadratic_1d").strong_convexity_mu == doctest::Approx(1.0));
  CHECK(*objective::catalog("quadratic_2d_paper").strong_convexity_mu ==
        doctest::Approx(0.05));
  CHECK(!objective::catalog("double_well_tilted").strong_convexity_mu.has_value());
}

TEST_CASE("confining and Villani checks accept the catalog") {
  // the outermost radius must push the flat axis of the 2D quadratic below
  // the integrability threshold
  const std::vector<double> radii{3.0, 5.0, 8.0, 12.0};
  for (const auto& name : objective::catalog_names()) {
    const ScalarField f = objective::catalog(name);
    CHECK(objective::check_confining(f, 0.2, radii).confining_ok);
    CHECK(objective::check_villani(f, 0.2, radii).villani_ok);
  }
}

TEST_CASE("a linear field fails the conditions at infinity") {
  ScalarField lin;
  lin.dimension = 1;
  lin.name = "linear";
  lin.value = [](const Point& p) { return 0.3 * p[0]; };
  lin.gradient = [](const Point&) { return point1(0.3); };
  lin.hessian = [](const Point&) { return SymMat{0, 0, 0}; };
  CHECK(!objective::check_confining(lin, 0.2, {2, 3, 4}).confining_ok);
  CHECK(!objective::check_villani(lin, 0.2, {2, 3, 4}).villani_ok);
  CHECK_THROWS_AS((void)objective::check_confining(lin, 0.2, {2.0, 1.0, 3.0}),
                  objective::CatalogError);
}

TEST_CASE("schrodinger potential closed form on the quadratic") {
  const ScalarField f = objective::make_quadratic_1d(2.0);
  // |grad|^2/s - lap: (2x)^2 / s - 2
  CHECK(objective::schrodinger_potential(f, 0.5, point1(1.5)) ==
        doctest::Approx(9.0 / 0.5 - 2.0));
}

TEST_CASE("newton refinement matches a bisection oracle on the tilted well") {
  const ScalarField f = objective::catalog("double_well_tilted");
  const auto fp = [&](double x) { return f.gradient(point1(x))[0]; };
  const double left = bisect_root(fp, -2.0, -0.8);
  const double saddle = bisect_root(fp, 0.0, 0.6);
  const double right = bisect_root(fp, 0.6, 1.5);
  CHECK(objective::newton_refine(f, point1(-1.3))[0] == doctest::Approx(left).epsilon(1e-10));
  CHECK(objective::newton_refine(f, point1(0.25))[0] == doctest::Approx(saddle).epsilon(1e-10));
  CHECK(objective::newton_refine(f, point1(1.0))[0] == doctest::Approx(right).epsilon(1e-10));

  const auto gm = objective::global_minimum(f);
  CHECK(gm.location[0] == doctest::Approx(left).epsilon(1e-10));
  CHECK(gm.value == doctest::Approx(f.value(point1(left))));
}

TEST_CASE("global minimum of the 2D catalog entries") {
  const auto q = objective::global_minimum(objective::catalog("quadratic_2d_paper"));
  CHECK(std::fabs(q.location[0]) < 1e-9);
  CHECK(std::fabs(q.location[1]) < 1e-9);

  const auto nc = objective::global_minimum(objective::catalog("nonconvex_2d_paper"));
  CHECK(nc.location[0] == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(nc.location[1] == doctest::Approx(-0.7).epsilon(1e-9));
  CHECK(nc.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}
