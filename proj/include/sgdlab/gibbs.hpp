#pragma once

#include <stdexcept>
#include <vector>

#include "sgdlab/field.hpp"
#include "sgdlab/grid.hpp"

namespace sgdlab::gibbs {

// Box too small for the requested measure; enlarge and retry.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A density left L^2(mu^{-1}) or the support condition failed.
struct NormOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// density ~ e^{-2f/s}, normalized by shifted log-sum-exp quadrature.
// Requires e^{-2(f - f_min)/s} < 1e-12 at every boundary node.
GridMeasure gibbs_on_grid(const ScalarField& field, double s, const GridSpec& grid);

// Smallest symmetric box (found by doubling from `start`) on which the
// boundary criterion holds, with `nodes` points per axis.
GridSpec default_box(const ScalarField& field, double s, std::size_t nodes,
                     double start = 2.0);

// excess risk at stationarity: integral of (f - f*) d mu_s, f* Newton-refined
double epsilon_of_s(const ScalarField& field, double s, const GridSpec& grid);

// d epsilon / d s = (2/s^2) Var_{mu_s}(f - f*)
double epsilon_derivative(const ScalarField& field, double s, const GridSpec& grid);

// C(s) = (integral of (f - f*)^2 d mu_s)^{1/2}
double c_of_s(const ScalarField& field, double s, const GridSpec& grid);

// (integral of (rho - mu)^2 / mu dx)^{1/2}; rho given as node densities on
// mu's grid.
double weighted_l2_distance(const std::vector<double>& rho, const GridMeasure& mu);

// (integral of mu_{s1}^2 / mu_{s2} dx - 1)^{1/2}; requires s1 > s2 > 0.
double cross_norm(const ScalarField& field, double s1, double s2, const GridSpec& grid);

// integral of rho log(rho/mu) dx, with 0 log 0 := 0
double relative_entropy(const std::vector<double>& rho, const GridMeasure& mu);

// max over interior nodes of |div(mu grad f) + (s/2) lap mu|, central stencils
double stationarity_residual(const ScalarField& field, const GridMeasure& mu);

}  // namespace sgdlab::gibbs
