#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sgdlab/field.hpp"
#include "sgdlab/noise.hpp"

namespace sgdlab::dynamics {

enum class Method { gd, sgd, sgld };

struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  Point last_finite;
  std::uint64_t step;
  DivergenceError(Point p, std::uint64_t k)
      : std::runtime_error("trajectory diverged"), last_finite(p), step(k) {}
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Point> states;
  std::vector<double> objective_values;
};

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_excess_risk;
  std::vector<double> std_err;
  int n_replicas = 0;
};

struct CouplingReport {
  double s = 0;
  double horizon_T = 0;
  double sup_deviation = 0;
  double noise_sup = 0;      // sup |W(t)| (continuous) or sup |xi_k| (discrete)
  double bound_value = 0;    // stated Gronwall-type bound
  double observed_accum = 0; // empirically accumulated bound (discrete case)
  bool bound_satisfied = false;
};

struct WeakErrorStudy {
  std::vector<double> s_values;
  std::vector<double> errors;   // max_k |E f(x_k) - E f(X(ks))| per s
  double fitted_order = 0;      // least-squares slope of log err vs log s
  bool conclusive = true;
};

struct HittingTime {
  double mean = 0;
  double std_err = 0;
  int n_hit = 0;
  int n_censored = 0;
  bool conclusive = true;
};

struct GaussianTail {
  double probability = 0;  // P(|X| >= x), X standard normal in R^d
  double bound = 0;        // 4 x^{d-2} e^{-x^2/2} / (2^{d/2} Gamma(d/2))
};

// x_{k+1} = x_k - s grad f(x_k) - s xi_k       (sgd)
// x_{k+1} = x_k - s grad f(x_k)                (gd)
// x_{k+1} = x_k - s grad f(x_k) + sqrt(s) xi_k (sgld)
Trajectory run_discrete(Method method, const ScalarField& field, double s,
                        std::uint64_t k_max, Point x0, const NoiseModel& noise);

// Euler-Maruyama for dX = -grad f dt + sqrt(s) dW; s = 0 gives gradient flow.
// Requires dt <= s/10 when s > 0.
Trajectory euler_maruyama(const ScalarField& field, double s, double dt, double T,
                          Point x0, const NoiseModel& noise);

// Mean excess risk f(x_k) - f_star over independent replicas; replica r uses
// NoiseModel{base_seed, r}.
EnsembleStats run_ensemble(Method method, const ScalarField& field, double s,
                           std::uint64_t k_max, Point x0, int n_replicas,
                           std::uint64_t base_seed, double f_star);

// Order-of-weak-convergence fit, SGD vs the SDE sharing one Brownian path per
// replica.
WeakErrorStudy weak_error_study(const ScalarField& field,
                                const std::vector<double>& s_list, double T,
                                int n_replicas, double dt_ref, Point x0,
                                std::uint64_t base_seed, double noise_scale = 1.0);

// First-passage times of Euler-Maruyama paths (1D): linear interpolation at
// the crossing step, with a Brownian-bridge test for intra-step excursions.
HittingTime hitting_time_mc(const ScalarField& field, double s, double x_start,
                            double x_target, int n_replicas, double dt,
                            double max_time, std::uint64_t base_seed);

// pi / sqrt(-f''(x_bullet) f''(x_circ)) * exp(2 (f(x_circ) - f(x_bullet)) / s)
double kramers_time(const ScalarField& field, double x_bullet, double x_circ, double s);

// X_s vs X_0 on one Brownian path; bound sqrt(s) sup|W| e^{LT}.
CouplingReport coupled_deviation(const ScalarField& field, double s, double T,
                                 double dt, const NoiseModel& noise);

// SGD vs GD with shared xi_k; stated bound s (1+Ls)^{T/s} sup|xi| and the
// observed accumulation sum s (1+Ls)^{k-j} |xi_j| are both recorded.
CouplingReport discrete_coupled_deviation(const ScalarField& field, double s,
                                          double T, const NoiseModel& noise);

// P(|X| >= x) = Gamma(d/2, x^2/2) / Gamma(d/2) plus the large-x bound.
GaussianTail gaussian_norm_tail(int d, double x);

}  // namespace sgdlab::dynamics
