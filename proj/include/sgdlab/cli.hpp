#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgdlab/dynamics.hpp"
#include "sgdlab/grid.hpp"
#include "sgdlab/morse.hpp"
#include "sgdlab/pde.hpp"
#include "sgdlab/spectral.hpp"

namespace sgdlab::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a s + b e^{-lambda_s t} with lambda_s = e^{-c/s}
double idealized_risk(double a, double b, double c, double s, double t);

// log10 of the first step k = t/s at which the transient b e^{-lambda_s t}
// drops below delta * a * s (log domain: the counts overflow doubles)
double log10_threshold_step(double a, double b, double c, double s, double delta);

// (1 / lambda_s) log(2 C rho_gap / epsilon); requires s <= epsilon / (2A)
double required_time(double s, double A, double C, double rho_gap, double epsilon,
                     double lambda_s);

// Versioned key=value config; unknown keys are errors.
struct Config {
  std::map<std::string, std::string> kv;

  static Config parse(const std::string& text,
                      const std::vector<std::string>& allowed_keys);
  std::string serialize() const;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;
  double get_num_or(const std::string& key, double fallback) const;
  std::vector<double> get_list(const std::string& key) const;
};

std::string ensemble_csv(const dynamics::EnsembleStats& stats);
std::string spectrum_json(const spectral::Spectrum& spectrum, const GridSpec& grid);
std::string decay_json(const pde::DecayFit& fit, double s);
std::string measure_csv(const GridMeasure& mu);

}  // namespace sgdlab::cli
