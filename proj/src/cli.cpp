#include "sgdlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace sgdlab::cli {

double idealized_risk(double a, double b, double c, double s, double t) {
  if (a <= 0 || b <= 0 || c <= 0 || s <= 0 || t < 0)
    throw ConfigError("idealized_risk needs positive parameters");
  const double lambda = std::exp(-c / s);
  return a * s + b * std::exp(-lambda * t);
}

double log10_threshold_step(double a, double b, double c, double s, double delta) {
  if (a <= 0 || b <= 0 || c <= 0 || s <= 0 || delta <= 0)
    throw ConfigError("threshold step needs positive parameters");
  // b e^{-lambda t} = delta a s  =>  t = log(b / (delta a s)) / lambda
  const double log_t = std::log(std::log(b / (delta * a * s))) + c / s;
  return (log_t - std::log(s)) / std::numbers::ln10;
}

double required_time(double s, double A, double C, double rho_gap, double epsilon,
                     double lambda_s) {
  if (s <= 0 || A <= 0 || C <= 0 || rho_gap <= 0 || epsilon <= 0 || lambda_s <= 0)
    throw ConfigError("required_time needs positive inputs");
  if (s > epsilon / (2 * A)) {
    std::ostringstream msg;
    msg << "s exceeds epsilon/(2A) = " << epsilon / (2 * A);
    throw ConfigError(msg.str());
  }
  return std::max(0.0, std::log(2 * C * rho_gap / epsilon) / lambda_s);
}

Config Config::parse(const std::string& text,
                     const std::vector<std::string>& allowed_keys) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed line: " + line);
    const std::string key = line.substr(0, eq);
    if (key != "version" &&
        std::find(allowed_keys.begin(), allowed_keys.end(), key) == allowed_keys.end())
      throw ConfigError("unknown config key: " + key);
    if (cfg.kv.count(key)) throw ConfigError("duplicate config key: " + key);
    cfg.kv[key] = line.substr(eq + 1);
  }
  if (cfg.kv.count("version") == 0) throw ConfigError("config must declare version=1");
  if (cfg.kv.at("version") != "1")
    throw ConfigError("unsupported config version " + cfg.kv.at("version"));
  return cfg;
}

std::string Config::serialize() const {
  std::ostringstream out;
  out << "version=" << kv.at("version") << "\n";
  for (const auto& [k, v] : kv)
    if (k != "version") out << k << "=" << v << "\n";
  return out.str();
}

std::string Config::get(const std::string& key) const {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key) const {
  try {
    std::size_t used = 0;
    const std::string v = get(key);
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("config key '" + key + "' is not a number");
  }
}

double Config::get_num_or(const std::string& key, double fallback) const {
  return has(key) ? get_num(key) : fallback;
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ConfigError("config key '" + key + "' holds a non-numeric entry");
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is empty");
  return out;
}

std::string ensemble_csv(const dynamics::EnsembleStats& stats) {
  std::ostringstream out;
  out.precision(17);
  out << "k,t,mean_excess_risk,std_err\n";
  for (std::size_t k = 0; k < stats.times.size(); ++k)
    out << k << ',' << stats.times[k] << ',' << stats.mean_excess_risk[k] << ','
        << stats.std_err[k] << '\n';
  return out.str();
}

std::string spectrum_json(const spectral::Spectrum& spectrum, const GridSpec& grid) {
  nlohmann::json j;
  j["s"] = spectrum.s;
  j["delta"] = spectrum.eigenvalues;
  j["lambda_s"] = spectrum.lambda_s;
  j["grid"]["dimension"] = grid.dimension;
  j["grid"]["lo"] = {grid.lo[0], grid.lo[1]};
  j["grid"]["hi"] = {grid.hi[0], grid.hi[1]};
  j["grid"]["n"] = {grid.n[0], grid.n[1]};
  return j.dump(2);
}

std::string decay_json(const pde::DecayFit& fit, double s) {
  nlohmann::json j;
  j["s"] = s;
  j["fitted_rate"] = fit.fitted_rate;
  j["reference_rate"] = fit.reference_rate;
  j["r2"] = fit.fit_r2;
  j["window"] = {fit.window.first, fit.window.second};
  return j.dump(2);
}

std::string measure_csv(const GridMeasure& mu) {
  std::ostringstream out;
  out.precision(17);
  out << (mu.grid.dimension == 1 ? "x,density\n" : "x,y,density\n");
  for (std::size_t i = 0; i < mu.grid.size(); ++i) {
    const Point p = mu.grid.node(i);
    out << p[0];
    if (mu.grid.dimension == 2) out << ',' << p[1];
    out << ',' << std::exp(mu.log_density[i]) << '\n';
  }
  return out.str();
}

}  // namespace sgdlab::cli
