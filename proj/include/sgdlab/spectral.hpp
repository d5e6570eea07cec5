#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "sgdlab/field.hpp"
#include "sgdlab/grid.hpp"

namespace sgdlab::spectral {

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Requested eigenvalue sits below the floating-point floor.
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// -s^2 Lap + |grad f|^2 - s Lap f, Dirichlet boundary; unknowns are the
// interior nodes of the grid in row-major order.
struct WittenOperator {
  GridSpec grid;
  double s = 0;
  Eigen::SparseMatrix<double> matrix;           // interior x interior
  std::vector<double> potential_values;         // |grad f|^2 - s lap f = s V_s at interior nodes
  std::vector<std::size_t> interior_to_node;    // interior index -> grid node index
};

struct Spectrum {
  std::vector<double> eigenvalues;              // delta_{s,0..k-1}, ascending
  std::vector<std::vector<double>> eigenvectors;  // full-grid node vectors, unit norm
  double s = 0;
  double lambda_s = 0;                          // delta_{s,1} / (2s)
  std::vector<double> zeta;                     // delta / s
};

struct ExpLawFit {
  std::vector<double> s_values;
  std::vector<double> lambda_values;
  double slope = 0;      // of log lambda_s vs 1/s; about -2 H_f
  double intercept = 0;  // about log(gamma_1 / 2)
  double r2 = 0;
};

struct GridPolicy {
  std::size_t nodes = 1500;    // per axis
  double start_radius = 2.0;   // doubling starts here
};

// Requires e^{-(f - f_min)/s} < 1e-10 at every boundary node.
WittenOperator assemble_witten(const ScalarField& field, double s, const GridSpec& grid);

// Smallest symmetric box (by doubling) satisfying the ground-state boundary
// criterion above.
GridSpec certified_box(const ScalarField& field, double s, const GridPolicy& policy);

// k smallest eigenvalues by shift-invert Lanczos with full
// reorthogonalization.
Spectrum smallest_eigs(const WittenOperator& op, int k, bool want_vectors = true);

// Dense symmetric eigensolve, usable as an independent check for operators of
// at most 2000 unknowns.
Spectrum smallest_eigs_dense(const WittenOperator& op, int k, bool want_vectors = true);

// Regression of log lambda_s on 1/s over at least 4 values of s.
ExpLawFit exp_law_fit(const ScalarField& field, const std::vector<double>& s_values,
                      const GridPolicy& policy = {});

// 1 - |<phi_0, normalized e^{-f/s}>| on the interior nodes.
double ground_state_check(const ScalarField& field, const WittenOperator& op,
                          const Spectrum& spectrum);

}  // namespace sgdlab::spectral
