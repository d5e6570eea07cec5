#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "sgdlab/field.hpp"
#include "sgdlab/gibbs.hpp"
#include "sgdlab/grid.hpp"

namespace sgdlab::pde {

struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DensitySnapshot {
  double time = 0;
  std::vector<double> density;  // node values on the evolution grid
};

struct DecayFit {
  std::vector<double> times;
  std::vector<double> norms;   // squared weighted norm per snapshot
  double fitted_rate = 0;      // decay rate of the squared norm
  double fit_r2 = 0;
  double reference_rate = 0;   // 2 lambda_s
  std::pair<double, double> window{0, 0};
  bool conclusive = true;
  // excess-risk fit E f(X_t) - f* = eps + D e^{-rate t}
  double excess_D = 0;
  double excess_rate = 0;
};

struct StationarityTime {
  double time = 0;
  bool censored = false;
};

// Smooth test function with analytic derivatives, used by the inequality
// checks.
struct TestFunction {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<SymMat(const Point&)> hessian;
};

struct MarginReport {
  std::vector<double> lhs, rhs;
  std::vector<double> margin;  // rhs - lhs per test function
  bool all_ok = true;          // margins >= -tolerance
};

struct GammaReport {
  std::vector<double> min_margin;  // nodewise min of Gamma2 - mu Gamma per g
  bool curvature_asserted = false; // only when strong_convexity_mu is declared
  bool all_ok = true;
};

struct EntropyDecayReport {
  std::vector<double> times;
  std::vector<double> l1_distance;
  std::vector<double> entropy;         // H(rho_t | mu_s)
  double ck_min_margin = 0;            // min of 2H - L1^2
  double fitted_entropy_rate = 0;      // from log H vs t
  double logsob_min_margin = 0;        // min of (s/mu) Dirichlet - Ent
  bool ok = true;
};

// Sums of Gaussian bumps with randomized centers and widths, mean square
// integrable and effectively supported inside [-radius, radius]^d.
std::vector<TestFunction> random_bumps(int dimension, int count, std::uint64_t seed,
                                       double radius);

// Conservative finite-volume evolution of
//   d rho / dt = div(rho grad f) + (s/2) lap rho
// with no-flux boundaries: backward Euler on exponentially fitted
// (Scharfetter-Gummel) fluxes, dimension-split in 2D. Unconditionally stable
// and positivity-preserving; stationary exactly on the fitted Gibbs profile.
// Returns n_snapshots evenly spaced states including t=0 and t=T.
std::vector<DensitySnapshot> fp_evolve(const ScalarField& field, double s,
                                       const std::vector<double>& rho0,
                                       const GridSpec& grid, double dt, double T,
                                       int n_snapshots = 50);

// rho(t,x) for f = theta x^2/2 started from the point mass at x0
DensitySnapshot ou_closed_form(double theta, double s, double x0, double t,
                               const GridSpec& grid);

// Decay of the squared weighted distance to mu_s, fitted log-linearly on the
// late time window, against the spectral reference rate 2 lambda_s.
DecayFit decay_fit(const ScalarField& field, double s, const std::vector<double>& rho0,
                   const GridSpec& grid, double dt, double T, double lambda_ref);

// First time |E f(X_t) - E f(X_inf)| <= delta * eps(s).
StationarityTime time_to_stationarity(const ScalarField& field, double s,
                                      const std::vector<double>& rho0,
                                      const GridSpec& grid, double delta, double dt,
                                      double T_max);

// integral of V_s h^2 dmu <= s integral of |grad h|^2 dmu, h mean-centered
MarginReport key_inequality_check(const ScalarField& field, double s,
                                  const std::vector<TestFunction>& test_fns,
                                  const GridSpec& grid);

// Var(h) <= (s / 2 lambda_s) integral of |grad h|^2 dmu
MarginReport poincare_check(const ScalarField& field, double s, double lambda_s,
                            const std::vector<TestFunction>& test_fns,
                            const GridSpec& grid);

// Gamma = (s/2)|grad g|^2, Gamma2 = (s/2) grad g . Hess f . grad g
// + (s^2/4) ||Hess g||_F^2; asserts Gamma2 >= mu Gamma when mu is declared.
GammaReport gamma_calculus_check(const ScalarField& field, double s,
                                 const std::vector<TestFunction>& g_fns,
                                 const GridSpec& grid);

// Csiszar-Kullback, exponential entropy decay, and log-Sobolev along the
// evolution of a strongly convex field.
EntropyDecayReport entropy_decay_check(const ScalarField& field, double s,
                                       const std::vector<double>& rho0,
                                       const GridSpec& grid, double dt, double T);

}  // namespace sgdlab::pde
