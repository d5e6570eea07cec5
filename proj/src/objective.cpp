#include "sgdlab/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sgdlab::objective {

namespace {

ScalarField quadratic_2d_paper() {
  ScalarField f;
  f.dimension = 2;
  f.name = "quadratic_2d_paper";
  f.value = [](const Point& p) { return 5e-2 * p[0] * p[0] + 2.5e-2 * p[1] * p[1]; };
  f.gradient = [](const Point& p) { return point2(0.1 * p[0], 0.05 * p[1]); };
  f.hessian = [](const Point&) { return SymMat{0.1, 0.0, 0.05}; };
  f.lipschitz_L = 0.1;
  f.strong_convexity_mu = 0.05;
  return f;
}

// One factor of the product-form function: u(x) = ((x+0.7)^2 + 0.1)(x-0.7)^2
// and its mirror v(x) = (x+0.7)^2 ((x-0.7)^2 + 0.1).
double prod_u(double x) {
  const double a = x + 0.7, b = x - 0.7;
  return (a * a + 0.1) * b * b;
}
double prod_u1(double x) {
  const double a = x + 0.7, b = x - 0.7;
  return 2 * a * b * b + (a * a + 0.1) * 2 * b;
}
double prod_u2(double x) {
  const double a = x + 0.7, b = x - 0.7;
  return 2 * b * b + 8 * a * b + 2 * a * a + 0.2;
}
double prod_v(double x) {
  const double a = x + 0.7, b = x - 0.7;
  return a * a * (b * b + 0.1);
}
double prod_v1(double x) {
  const double a = x + 0.7, b = x - 0.7;
  return 2 * a * (b * b + 0.1) + a * a * 2 * b;
}
double prod_v2(double x) {
  const double a = x + 0.7, b = x - 0.7;
  return 2 * (b * b + 0.1) + 8 * a * b + 2 * a * a;
}

ScalarField nonconvex_2d_paper() {
  ScalarField f;
  f.dimension = 2;
  f.name = "nonconvex_2d_paper";
  f.value = [](const Point& p) { return prod_u(p[0]) + prod_v(p[1]); };
  f.gradient = [](const Point& p) { return point2(prod_u1(p[0]), prod_v1(p[1])); };
  f.hessian = [](const Point& p) { return SymMat{prod_u2(p[0]), 0.0, prod_v2(p[1])}; };
  return f;
}

ScalarField double_well_tilted() {
  ScalarField f;
  f.dimension = 1;
  f.name = "double_well_tilted";
  f.value = [](const Point& p) {
    const double x = p[0];
    return 0.25 * x * x * x * x - 0.5 * x * x + 0.3 * x;
  };
  f.gradient = [](const Point& p) {
    const double x = p[0];
    return point1(x * x * x - x + 0.3);
  };
  f.hessian = [](const Point& p) { return SymMat{3 * p[0] * p[0] - 1, 0, 0}; };
  return f;
}

// f' = 0.1 x (x-1.2)(x+1.1)(x-2.2)(x+2.3): wells at -2.3, 0, 2.2 with
// pairwise-distinct values and barriers.
ScalarField multiwell_1d_generic() {
  ScalarField f;
  f.dimension = 1;
  f.name = "multiwell_1d_generic";
  f.value = [](const Point& p) {
    const double x = p[0];
    return x * x * x * x * x * x / 60.0 - 639.0 / 4000.0 * x * x * x * x +
           187.0 / 15000.0 * x * x * x + 8349.0 / 25000.0 * x * x;
  };
  f.gradient = [](const Point& p) {
    const double x = p[0];
    return point1(0.1 * x * x * x * x * x - 0.639 * x * x * x + 0.0374 * x * x +
                  0.66792 * x);
  };
  f.hessian = [](const Point& p) {
    const double x = p[0];
    return SymMat{0.5 * x * x * x * x - 1.917 * x * x + 0.0748 * x + 0.66792, 0, 0};
  };
  return f;
}

ScalarField multiwell_1d_degenerate() {
  ScalarField f;
  f.dimension = 1;
  f.name = "multiwell_1d_degenerate";
  f.value = [](const Point& p) {
    const double t = p[0] * p[0] - 1;
    return 0.25 * t * t;
  };
  f.gradient = [](const Point& p) {
    const double x = p[0];
    return point1(x * x * x - x);
  };
  f.hessian = [](const Point& p) { return SymMat{3 * p[0] * p[0] - 1, 0, 0}; };
  return f;
}

ScalarField ring_1saddle() {
  ScalarField f;
  f.dimension = 2;
  f.name = "ring_1saddle";
  f.value = [](const Point& p) {
    const double t = p[0] * p[0] + p[1] * p[1] - 1;
    return t * t + 0.2 * p[0];
  };
  f.gradient = [](const Point& p) {
    const double t = p[0] * p[0] + p[1] * p[1] - 1;
    return point2(4 * p[0] * t + 0.2, 4 * p[1] * t);
  };
  f.hessian = [](const Point& p) {
    const double t = p[0] * p[0] + p[1] * p[1] - 1;
    return SymMat{4 * t + 8 * p[0] * p[0], 8 * p[0] * p[1], 4 * t + 8 * p[1] * p[1]};
  };
  return f;
}

double min_on_shell(const ScalarField& field, double r,
                    const std::function<double(const Point&)>& g) {
  if (field.dimension == 1) return std::min(g(point1(-r)), g(point1(r)));
  constexpr int kAngles = 720;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kAngles; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / kAngles;
    m = std::min(m, g(point2(r * std::cos(phi), r * std::sin(phi))));
  }
  return m;
}

double logadd(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Relative mass of e^{-2f/s} outside |x| > R, against the mass inside.
// Integrates outward in shells until the integrand is negligible or the
// integral is evidently divergent.
double tail_mass(const ScalarField& field, double s, double R) {
  const auto log_shell = [&](double r) {
    // most mass on a shell sits where f is smallest
    const double fmin = min_on_shell(field, r, field.value);
    double v = -2.0 * fmin / s;
    if (field.dimension == 2) v += std::log(2.0 * std::numbers::pi * std::max(r, 1e-6));
    return v;
  };

  // inner mass estimate (log domain), coarse radial sweep
  constexpr int kInner = 400;
  double log_inner = -std::numeric_limits<double>::infinity();
  const double hr = R / kInner;
  for (int i = 0; i <= kInner; ++i)
    log_inner = logadd(log_inner, log_shell(i * hr) + std::log(hr));

  double log_tail = -std::numeric_limits<double>::infinity();
  const double hstep = std::max(R / 200.0, 1e-3);
  double r = R;
  double prev = log_shell(r);
  for (int i = 0; i < 200000; ++i) {
    const double rn = r + hstep;
    const double cur = log_shell(rn);
    log_tail = logadd(log_tail, std::max(prev, cur) + std::log(hstep));
    if (cur >= prev && cur > log_inner - 700.0 && i > 10) {
      // integrand not decaying outward: treat as divergent
      return std::numeric_limits<double>::infinity();
    }
    if (cur < log_inner - 700.0) break;  // further shells contribute nothing
    prev = cur;
    r = rn;
  }
  return std::exp(log_tail - log_inner);
}

void check_probes(const ScalarField& field, const std::vector<double>& radii) {
  if (radii.size() < 3) throw CatalogError("need at least 3 probe radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1]) throw CatalogError("probe radii must be strictly increasing");
}

}  // namespace

ScalarField make_quadratic_1d(double theta) {
  ScalarField f;
  f.dimension = 1;
  f.name = "quadratic_1d";
  f.value = [theta](const Point& p) { return 0.5 * theta * p[0] * p[0]; };
  f.gradient = [theta](const Point& p) { return point1(theta * p[0]); };
  f.hessian = [theta](const Point&) { return SymMat{theta, 0, 0}; };
  f.lipschitz_L = theta;
  f.strong_convexity_mu = theta;
  return f;
}

std::vector<std::string> catalog_names() {
  return {"quadratic_1d",        "quadratic_2d_paper",      "nonconvex_2d_paper",
          "double_well_tilted",  "multiwell_1d_generic",    "multiwell_1d_degenerate",
          "ring_1saddle"};
}

ScalarField catalog(const std::string& name) {
  if (name == "quadratic_1d") return make_quadratic_1d(1.0);
  if (name.rfind("quadratic_1d(", 0) == 0 && name.back() == ')') {
    const double theta = std::stod(name.substr(13, name.size() - 14));
    if (theta <= 0) throw CatalogError("quadratic_1d theta must be positive");
    return make_quadratic_1d(theta);
  }
  if (name == "quadratic_2d_paper") return quadratic_2d_paper();
  if (name == "nonconvex_2d_paper") return nonconvex_2d_paper();
  if (name == "double_well_tilted") return double_well_tilted();
  if (name == "multiwell_1d_generic") return multiwell_1d_generic();
  if (name == "multiwell_1d_degenerate") return multiwell_1d_degenerate();
  if (name == "ring_1saddle") return ring_1saddle();
  std::ostringstream msg;
  msg << "unknown catalog entry '" << name << "'; available:";
  for (const auto& n : catalog_names()) msg << ' ' << n;
  throw CatalogError(msg.str());
}

double schrodinger_potential(const ScalarField& field, double s, const Point& x) {
  return field.grad_norm_sq(x) / s - field.laplacian(x);
}

ConditionReport check_confining(const ScalarField& field, double s,
                                const std::vector<double>& radii) {
  check_probes(field, radii);
  ConditionReport rep;
  rep.probe_radii = radii;
  const auto probe = [&](const Point& p) {
    const double v = field.value(p);
    if (!std::isfinite(v)) throw EvaluationError("non-finite objective at probe", p);
    return v;
  };
  for (double r : radii) rep.min_potential_on_shells.push_back(min_on_shell(field, r, probe));

  bool increasing = true;
  for (std::size_t i = 1; i < radii.size(); ++i)
    increasing &= rep.min_potential_on_shells[i] > rep.min_potential_on_shells[i - 1];

  constexpr double kTailThreshold = 1e-10;
  rep.integrability_tail = increasing ? tail_mass(field, s, radii.back())
                                      : std::numeric_limits<double>::infinity();
  rep.confining_ok = increasing && rep.integrability_tail < kTailThreshold;
  return rep;
}

Point newton_refine(const ScalarField& field, Point x, int max_iter) {
  const int dim = field.dimension;
  for (int it = 0; it < max_iter; ++it) {
    const Point g = field.gradient(x);
    const double gn = norm(g, dim);
    if (gn < 1e-14) return x;
    const SymMat h = field.hessian(x);
    Point step{0, 0};
    if (dim == 1) {
      if (h.a11 == 0) throw EvaluationError("singular Hessian in Newton refinement", x);
      step[0] = g[0] / h.a11;
    } else {
      const double det = h.det(2);
      if (det == 0) throw EvaluationError("singular Hessian in Newton refinement", x);
      step[0] = (h.a22 * g[0] - h.a12 * g[1]) / det;
      step[1] = (-h.a12 * g[0] + h.a11 * g[1]) / det;
    }
    // damping: halve until the gradient norm decreases
    double alpha = 1.0;
    Point next = x;
    for (int half = 0; half < 60; ++half) {
      next = {x[0] - alpha * step[0], x[1] - alpha * step[1]};
      if (norm(field.gradient(next), dim) < gn) break;
      alpha *= 0.5;
      if (half == 59)
        throw EvaluationError("Newton refinement stagnated", x);
    }
    x = next;
  }
  if (norm(field.gradient(x), dim) > 1e-9)
    throw EvaluationError("Newton refinement did not converge", x);
  return x;
}

Minimum global_minimum(const ScalarField& field, double radius) {
  const int dim = field.dimension;
  constexpr int kGrid = 201;
  Point best{0, 0};
  double best_v = std::numeric_limits<double>::infinity();
  const double h = 2 * radius / (kGrid - 1);
  const int ny = dim == 2 ? kGrid : 1;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < ny; ++j) {
      const Point p{-radius + i * h, dim == 2 ? -radius + j * h : 0.0};
      const double v = field.value(p);
      if (v < best_v) {
        best_v = v;
        best = p;
      }
    }
  }
  const Point refined = newton_refine(field, best);
  return Minimum{refined, field.value(refined)};
}

ConditionReport check_villani(const ScalarField& field, double s,
                              const std::vector<double>& radii) {
  check_probes(field, radii);
  ConditionReport rep;
  rep.probe_radii = radii;
  const auto probe = [&](const Point& p) {
    const double v = schrodinger_potential(field, s, p);
    if (!std::isfinite(v)) throw EvaluationError("non-finite potential at probe", p);
    return v;
  };
  for (double r : radii) rep.min_potential_on_shells.push_back(min_on_shell(field, r, probe));

  bool increasing = true;
  for (std::size_t i = 1; i < radii.size(); ++i)
    increasing &= rep.min_potential_on_shells[i] > rep.min_potential_on_shells[i - 1];
  rep.villani_ok = increasing && rep.min_potential_on_shells.back() > 0;
  return rep;
}

}  // namespace sgdlab::objective
