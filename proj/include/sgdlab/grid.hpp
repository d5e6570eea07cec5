#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sgdlab/field.hpp"

namespace sgdlab {

// Uniform tensor grid on a box; axis 1 is unused in 1D. Row-major node
// ordering: idx = ix * n[1] + iy.
struct GridSpec {
  int dimension = 1;
  std::array<double, 2> lo{0, 0};
  std::array<double, 2> hi{0, 0};
  std::array<std::size_t, 2> n{0, 1};  // points per axis

  static GridSpec line(double a, double b, std::size_t nodes) {
    return GridSpec{1, {a, 0}, {b, 0}, {nodes, 1}};
  }
  static GridSpec box(double ax, double bx, double ay, double by, std::size_t nx,
                      std::size_t ny) {
    return GridSpec{2, {ax, ay}, {bx, by}, {nx, ny}};
  }

  std::size_t size() const { return n[0] * n[1]; }
  double spacing(int axis) const {
    return (hi[axis] - lo[axis]) / static_cast<double>(n[axis] - 1);
  }
  double coord(int axis, std::size_t i) const {
    return lo[axis] + static_cast<double>(i) * spacing(axis);
  }
  Point node(std::size_t idx) const {
    if (dimension == 1) return point1(coord(0, idx));
    return point2(coord(0, idx / n[1]), coord(1, idx % n[1]));
  }
  // trapezoid quadrature weight (cell volume factor included)
  double weight(std::size_t idx) const {
    const auto edge = [&](int axis, std::size_t i) {
      return (i == 0 || i + 1 == n[axis]) ? 0.5 : 1.0;
    };
    double w = spacing(0) * edge(0, dimension == 1 ? idx : idx / n[1]);
    if (dimension == 2) w *= spacing(1) * edge(1, idx % n[1]);
    return w;
  }
  bool on_boundary(std::size_t idx) const {
    if (dimension == 1) return idx == 0 || idx + 1 == n[0];
    const std::size_t ix = idx / n[1], iy = idx % n[1];
    return ix == 0 || ix + 1 == n[0] || iy == 0 || iy + 1 == n[1];
  }

  void validate(std::size_t cap = 4'000'000) const {
    if (dimension != 1 && dimension != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
    if (n[0] < 3 || (dimension == 2 && n[1] < 3)) throw std::invalid_argument("grid needs at least 3 nodes per axis");
    for (int a = 0; a < dimension; ++a)
      if (hi[a] <= lo[a]) throw std::invalid_argument("grid bounds must be increasing");
    if (size() > cap) throw std::invalid_argument("grid exceeds the node cap");
  }
};

// Probability density in log-domain storage with its normalization constant.
struct GridMeasure {
  GridSpec grid;
  std::vector<double> log_density;  // normalized: logsumexp of (log_density + log weight) = 0
  double log_Z = 0;                 // log of the raw partition function of e^{-2f/s}
  double Z_s = 0;
  double s = 0;

  double density(std::size_t idx) const;
  // trapezoid quadrature of g against the measure
  double integrate(const std::function<double(const Point&)>& g) const;
};

}  // namespace sgdlab
