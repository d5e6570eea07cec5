#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace sgdlab {

// Points live in R^1 or R^2; component [1] is ignored in 1D.
using Point = std::array<double, 2>;

inline Point point1(double x) { return {x, 0.0}; }
inline Point point2(double x, double y) { return {x, y}; }

inline double norm(const Point& p, int dim) {
  return dim == 1 ? std::fabs(p[0]) : std::hypot(p[0], p[1]);
}

inline double dot(const Point& a, const Point& b, int dim) {
  double s = a[0] * b[0];
  if (dim == 2) s += a[1] * b[1];
  return s;
}

// Symmetric 2x2 (or 1x1, using a11 only).
struct SymMat {
  double a11 = 0, a12 = 0, a22 = 0;

  double trace(int dim) const { return dim == 1 ? a11 : a11 + a22; }
  double det(int dim) const { return dim == 1 ? a11 : a11 * a22 - a12 * a12; }

  // eigenvalues in descending order
  std::array<double, 2> eigs(int dim) const {
    if (dim == 1) return {a11, 0.0};
    const double m = 0.5 * (a11 + a22);
    const double d = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
    return {m + d, m - d};
  }
};

// Objective with exact derivative closures. Evaluators are pure; the struct
// is safe to share across threads.
struct ScalarField {
  int dimension = 1;
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<SymMat(const Point&)> hessian;
  std::optional<double> lipschitz_L;
  std::optional<double> strong_convexity_mu;

  double laplacian(const Point& x) const { return hessian(x).trace(dimension); }
  double grad_norm_sq(const Point& x) const {
    const Point g = gradient(x);
    return dot(g, g, dimension);
  }
};

}  // namespace sgdlab
