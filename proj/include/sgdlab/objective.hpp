#pragma once

#include <stdexcept>
#include <vector>

#include "sgdlab/field.hpp"

namespace sgdlab::objective {

struct CatalogError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvaluationError : std::runtime_error {
  Point where;
  EvaluationError(const std::string& msg, Point p) : std::runtime_error(msg), where(p) {}
};

// Report from the probe-based checks of the conditions at infinity.
struct ConditionReport {
  bool confining_ok = false;
  bool villani_ok = false;
  std::vector<double> probe_radii;
  std::vector<double> min_potential_on_shells;  // f for confining, V_s for Villani
  double integrability_tail = 0;  // relative mass of e^{-2f/s} outside the largest shell
};

// Stable catalog names:
//   quadratic_1d            theta = 1 (or "quadratic_1d(theta)")
//   quadratic_2d_paper      5e-2 x1^2 + 2.5e-2 x2^2
//   nonconvex_2d_paper      product-form function with four local minima
//   double_well_tilted      x^4/4 - x^2/2 + 0.3 x
//   multiwell_1d_generic    degree-6 polynomial, three wells, distinct barriers
//   multiwell_1d_degenerate (x^2-1)^2/4, symmetric wells
//   ring_1saddle            (x^2+y^2-1)^2 + 0.2 x, non-separating index-1 saddle
ScalarField catalog(const std::string& name);

std::vector<std::string> catalog_names();

ScalarField make_quadratic_1d(double theta);

// f grows along every shell and the Gibbs tail beyond the largest radius is
// negligible.
ConditionReport check_confining(const ScalarField& field, double s,
                                const std::vector<double>& radii);

// V_s = |grad f|^2/s - lap f increases across shells and is positive on the
// outermost one.
ConditionReport check_villani(const ScalarField& field, double s,
                              const std::vector<double>& radii);

// Schroedinger potential V_s(x); shared with the spectral module.
double schrodinger_potential(const ScalarField& field, double s, const Point& x);

struct Minimum {
  Point location{0, 0};
  double value = 0;
};

// Global minimum: coarse scan over [-radius, radius]^d followed by damped
// Newton refinement to machine precision.
Minimum global_minimum(const ScalarField& field, double radius = 4.0);

// Damped Newton on |grad f| from a given start; returns the refined critical
// point (not necessarily a minimum). Throws EvaluationError on stagnation.
Point newton_refine(const ScalarField& field, Point x, int max_iter = 100);

}  // namespace sgdlab::objective
