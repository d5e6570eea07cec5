#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgdlab/field.hpp"
#include "sgdlab/grid.hpp"

namespace sgdlab::morse {

struct NondegeneracyError : std::runtime_error {
  Point where;
  NondegeneracyError(const std::string& msg, Point p)
      : std::runtime_error(msg), where(p) {}
};
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoBarrierError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CriticalPoint {
  Point location{0, 0};
  double value = 0;
  int index = 0;                            // negative Hessian eigenvalues
  std::array<double, 2> hessian_eigs{0, 0}; // descending; [1] unused in 1D
  bool converged = false;
};

// One entry of the ordered labeling; a missing saddle is the fictive saddle
// at infinity.
struct SaddlePairing {
  std::optional<CriticalPoint> saddle;
  CriticalPoint minimum;
  double barrier = 0;  // f(saddle) - f(minimum); +inf for the fictive pair
  std::optional<double> gamma;
  // populated instead of a point barrier on the degenerate path
  std::optional<std::pair<double, double>> barrier_interval;
};

struct MorseReport {
  std::vector<CriticalPoint> minima;
  std::vector<CriticalPoint> saddles_index1;
  std::vector<CriticalPoint> separating_saddles;
  std::vector<SaddlePairing> pairings;  // fictive pair first, barriers nonincreasing
  double H_f = 0;                       // largest finite barrier; +inf if none
  bool generic = true;
  std::vector<std::string> degenerate_notes;
};

struct PredictionInterval {
  double lo = 0, hi = 0;
  bool point() const { return lo == hi; }
};

// Newton from every grid-local minimum of |grad f|^2 (plus midpoints between
// found minima); deduplicated, with Hessian eigendecompositions attached.
std::vector<CriticalPoint> find_critical_points(const ScalarField& field,
                                                const GridSpec& grid,
                                                double newton_tol = 1e-10,
                                                double dedupe_radius = 1e-6);

// Do the two descent sides of an index-1 saddle land in different connected
// components of {f < f(saddle) - level_offset}?
bool separating_test(const ScalarField& field, const CriticalPoint& saddle,
                     const GridSpec& grid, double level_offset);

MorseReport labeling(const ScalarField& field,
                     const std::vector<CriticalPoint>& criticals,
                     const GridSpec& grid);

// H_f, the largest finite barrier of the ordered pairing
double barrier(const MorseReport& report);

// gamma = (|eta_d(saddle)| / pi) sqrt(det Hess f(min) / -det Hess f(saddle))
double prefactor(const ScalarField& field, const SaddlePairing& pairing);

// delta_{s,ell} prediction s gamma_ell e^{-2 barrier_ell / s}; an interval on
// the degenerate path
PredictionInterval eyring_kramers_predict(const ScalarField& field,
                                          const MorseReport& report, double s,
                                          int ell);

std::string to_json(const MorseReport& report);

}  // namespace sgdlab::morse
