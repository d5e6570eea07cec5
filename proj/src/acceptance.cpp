#include "sgdlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "sgdlab/cli.hpp"
#include "sgdlab/dynamics.hpp"
#include "sgdlab/gibbs.hpp"
#include "sgdlab/morse.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/pde.hpp"
#include "sgdlab/spectral.hpp"

namespace sgdlab::acceptance {

namespace {

struct Check {
  std::ostringstream detail;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "FAILED: " << what << "; ";
    }
  }
  void note(const std::string& what) { detail << what << "; "; }
};

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

bool within(double value, double target, double rel) {
  return std::fabs(value - target) <= rel * std::fabs(target);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::vector<double> normalized_mixture(const GridSpec& grid, std::uint64_t seed) {
  const NoiseModel rng{seed, 0};
  std::uint64_t draw = 0;
  const auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform(draw++, 0);
  };
  std::vector<double> rho(grid.size(), 0.0);
  for (int b = 0; b < 3; ++b) {
    const double c = u(-2, 2), w = u(0.3, 1.0), a = u(0.2, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid.coord(0, i) - c;
      rho[i] += a * std::exp(-d * d / (2 * w * w));
    }
  }
  double mass = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) mass += grid.weight(i) * rho[i];
  for (auto& r : rho) r /= mass;
  return rho;
}

// ---- criteria -------------------------------------------------------------

void criterion_spectral_gap(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const ScalarField q1 = objective::make_quadratic_1d(1.0);
  const GridSpec g1 = GridSpec::line(-8, 8, 2000);
  for (double s : {0.05, 0.1, 0.2}) {
    const auto sp = spectral::smallest_eigs(spectral::assemble_witten(q1, s, g1), 3, false);
    c.expect(within(sp.lambda_s, 1.0, 0.02),
             "1D lambda_s = " + fmt(sp.lambda_s) + " at s = " + fmt(s));
  }
  const ScalarField q2 = objective::catalog("quadratic_2d_paper");
  const spectral::GridPolicy policy{301, 2.0};
  for (double s : {0.05, 0.1}) {
    const GridSpec g2 = spectral::certified_box(q2, s, policy);
    const auto sp = spectral::smallest_eigs(spectral::assemble_witten(q2, s, g2), 3, false);
    c.expect(within(sp.lambda_s, 0.05, 0.03),
             "2D lambda_s = " + fmt(sp.lambda_s) + " at s = " + fmt(s));
  }
}

void criterion_eyring_kramers(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const GridSpec mg = GridSpec::line(-3, 3, 1501);
  const auto report = morse::labeling(dw, morse::find_critical_points(dw, mg), mg);
  const double H = morse::barrier(report);
  const double gamma1 = report.pairings.at(1).gamma.value();

  // s must sit well below the barrier 0.0252 or the exponential law is still
  // swamped by its preasymptotic corrections
  const auto fit = spectral::exp_law_fit(dw, {0.025, 0.02, 0.016, 0.014, 0.012},
                                         spectral::GridPolicy{3000, 2.0});
  const double H_est = -fit.slope / 2.0;
  c.note("H_f = " + fmt(H) + ", spectral estimate " + fmt(H_est));
  c.expect(within(H_est, H, 0.05), "slope/-2 = " + fmt(H_est) + " vs H_f = " + fmt(H));
  const double target = std::log(gamma1 / 2.0);
  c.expect(std::fabs(fit.intercept - target) <= 0.2 * std::fabs(target),
           "intercept " + fmt(fit.intercept) + " vs log(gamma/2) = " + fmt(target));
}

void criterion_lambda_ratio(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const double H = 0.05;
  const double log_ratio = 2 * H * (1.0 / 0.001 - 1.0 / 0.1);  // lambda = e^{-2H/s}
  const double reference = 9.889e42;
  const double ratio_over_ref = std::exp(log_ratio - std::log(reference));
  c.expect(std::fabs(ratio_over_ref - 1.0) <= 1e-3,
           "ratio/9.889e42 = " + fmt(ratio_over_ref));
}

void criterion_hitting_time(Check& c, bool full, std::uint64_t seed) {
  const ScalarField ou = objective::make_quadratic_1d(1.0);
  const double s = 0.5;
  const double target = std::sqrt(std::numbers::pi * s) * std::exp(2.0 * 0.5 / s);
  const auto ht = dynamics::hitting_time_mc(ou, s, 0.0, 1.0, 10000, 1e-3, 100.0, seed);
  c.expect(ht.conclusive, "OU hitting-time censoring");
  c.expect(within(ht.mean, target, 0.15),
           "OU mean " + fmt(ht.mean) + " vs " + fmt(target));

  // deep well: barrier 0.617 at s = 0.2 keeps the escape asymptotics accurate
  const ScalarField dw = objective::catalog("double_well_tilted");
  const double x_min = objective::newton_refine(dw, point1(-1.1))[0];
  const double x_sad = objective::newton_refine(dw, point1(0.34))[0];
  const double kt = dynamics::kramers_time(dw, x_min, x_sad, 0.2);
  const auto esc =
      dynamics::hitting_time_mc(dw, 0.2, x_min, x_sad, full ? 2000 : 500, 0.01,
                                6000.0, seed + 1);
  c.expect(esc.conclusive, "double-well censoring");
  c.expect(within(esc.mean, kt, 0.20),
           "escape mean " + fmt(esc.mean) + " vs Kramers " + fmt(kt));
}

double ou_sup_error(std::size_t nodes, double T_evolve) {
  const ScalarField ou = objective::make_quadratic_1d(1.0);
  const double s = 0.5, t0 = 0.1;
  const GridSpec g = GridSpec::line(-6, 6, nodes);
  const double h = g.spacing(0);
  const auto rho0 = pde::ou_closed_form(1.0, s, 1.0, t0, g).density;
  const auto snaps = pde::fp_evolve(ou, s, rho0, g, 0.4 * h * h / s, T_evolve, 20);
  double worst = 0;
  for (const auto& snap : snaps) {
    if (snap.time == 0) continue;
    const auto exact = pde::ou_closed_form(1.0, s, 1.0, t0 + snap.time, g).density;
    for (std::size_t i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::fabs(snap.density[i] - exact[i]));
  }
  return worst;
}

void criterion_fp_oracle(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const double err_fine = ou_sup_error(2000, 1.9);  // covers t = 0.5, 1, 2
  c.expect(err_fine <= 1e-3, "sup error " + fmt(err_fine) + " on 2000 nodes");
  const double err_coarse = ou_sup_error(1000, 1.9);
  const double ratio = err_coarse / err_fine;
  c.expect(ratio >= 2.5 && ratio <= 6.0, "refinement ratio " + fmt(ratio));
}

void criterion_decay_consistency(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const double s = 0.2;
  const auto sp = spectral::smallest_eigs(
      spectral::assemble_witten(dw, s, GridSpec::line(-4, 4, 1500)), 3, false);
  // box just past the support of both measures; wider boxes spend resolution
  // where the densities vanish
  const GridSpec g = GridSpec::line(-2.6, 2.6, 800);
  const GridMeasure warm = gibbs::gibbs_on_grid(dw, 0.3, g);
  std::vector<double> rho0(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rho0[i] = warm.density(i);
  const double h = g.spacing(0);
  const auto fit = pde::decay_fit(dw, s, rho0, g, 0.4 * h * h / s, 40.0, sp.lambda_s);
  c.expect(fit.conclusive, "decay fit window");
  c.expect(within(fit.fitted_rate, fit.reference_rate, 0.10),
           "rate " + fmt(fit.fitted_rate) + " vs 2 lambda_s = " + fmt(fit.reference_rate));
}

void criterion_weak_error(Check& c, bool full, std::uint64_t seed) {
  const int replicas = full ? 100000 : 20000;
  const auto study = dynamics::weak_error_study(objective::make_quadratic_1d(1.0),
                                                {0.2, 0.1, 0.05, 0.025}, 5.0, replicas,
                                                0.025 / 20.0, point1(1.0), seed);
  c.expect(study.conclusive, "errors exceed Monte Carlo noise");
  c.expect(study.fitted_order >= 0.8 && study.fitted_order <= 1.2,
           "fitted order " + fmt(study.fitted_order));
}

void criterion_epsilon_laws(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const std::vector<double> s_values{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  for (const auto& name : objective::catalog_names()) {
    const ScalarField f = objective::catalog(name);
    const GridSpec g = gibbs::default_box(f, s_values.back(),
                                          f.dimension == 1 ? 3001 : 301);
    std::vector<double> eps;
    double A = 0;
    for (double s : s_values) {
      eps.push_back(gibbs::epsilon_of_s(f, s, g));
      A = std::max(A, gibbs::epsilon_derivative(f, s, g));
    }
    for (std::size_t i = 1; i < eps.size(); ++i)
      c.expect(eps[i] > eps[i - 1], name + ": eps not increasing at s = " + fmt(s_values[i]));
    for (std::size_t i = 0; i < eps.size(); ++i)
      c.expect(eps[i] <= A * s_values[i] * (1 + 1e-9),
               name + ": eps(s) > A s at s = " + fmt(s_values[i]));
    if (name == "quadratic_1d")
      for (std::size_t i = 0; i < eps.size(); ++i)
        c.expect(std::fabs(eps[i] - s_values[i] / 4) <= 1e-4,
                 "1D eps(" + fmt(s_values[i]) + ") = " + fmt(eps[i]));
    if (name == "quadratic_2d_paper")
      for (std::size_t i = 0; i < eps.size(); ++i)
        c.expect(std::fabs(eps[i] - s_values[i] / 2) <= 1e-4,
                 "2D eps(" + fmt(s_values[i]) + ") = " + fmt(eps[i]));
  }
}

void criterion_morse_structure(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const ScalarField ncv = objective::catalog("nonconvex_2d_paper");
  const GridSpec g2 = GridSpec::box(-2, 2, -2, 2, 201, 201);
  const auto criticals = morse::find_critical_points(ncv, g2);
  int n_minima = 0;
  const morse::CriticalPoint* global = nullptr;
  for (const auto& cp : criticals)
    if (cp.index == 0) {
      ++n_minima;
      if (!global || cp.value < global->value) global = &cp;
    }
  c.expect(n_minima == 4, "found " + std::to_string(n_minima) + " minima");
  c.expect(global && global->location[0] > 0 && global->location[1] < 0,
           "global minimum quadrant");

  for (const auto& name :
       {"double_well_tilted", "multiwell_1d_generic", "multiwell_1d_degenerate"}) {
    const ScalarField f = objective::catalog(name);
    const GridSpec g = GridSpec::line(-4, 4, 2001);
    const auto rep = morse::labeling(f, morse::find_critical_points(f, g), g);
    c.expect(rep.separating_saddles.size() + 1 == rep.minima.size(),
             std::string(name) + ": saddle count");
    for (std::size_t i = 2; i < rep.pairings.size(); ++i)
      c.expect(rep.pairings[i].barrier <= rep.pairings[i - 1].barrier + 1e-12,
               std::string(name) + ": barrier ordering");
    if (std::string(name) == "multiwell_1d_degenerate")
      c.expect(!rep.generic, "symmetric well must route to the degenerate path");
    else
      c.expect(rep.generic, std::string(name) + ": expected generic labeling");
  }
}

void criterion_functional_inequalities(Check& c, bool /*full*/, std::uint64_t seed) {
  const ScalarField dw = objective::catalog("double_well_tilted");
  const GridSpec gdw = GridSpec::line(-4, 4, 1201);
  const auto bumps = pde::random_bumps(1, 20, seed, 3.0);
  c.expect(pde::key_inequality_check(dw, 0.2, bumps, gdw).all_ok, "key inequality");
  const auto sp = spectral::smallest_eigs(
      spectral::assemble_witten(dw, 0.2, GridSpec::line(-4, 4, 1500)), 3, false);
  c.expect(pde::poincare_check(dw, 0.2, sp.lambda_s, bumps, gdw).all_ok, "Poincare");

  // h = x saturates the Poincare inequality for the quadratic
  const ScalarField ou = objective::make_quadratic_1d(1.0);
  pde::TestFunction hx;
  hx.value = [](const Point& p) { return p[0]; };
  hx.gradient = [](const Point&) { return point1(1.0); };
  hx.hessian = [](const Point&) { return SymMat{}; };
  const GridSpec gou = GridSpec::line(-6, 6, 2001);
  const auto eq = pde::poincare_check(ou, 0.5, 1.0, {hx}, gou);
  c.expect(std::fabs(eq.margin[0]) <= 1e-4 * eq.rhs[0],
           "Poincare equality margin " + fmt(eq.margin[0]));

  const auto b1 = pde::random_bumps(1, 10, seed + 1, 3.0);
  const auto g1rep = pde::gamma_calculus_check(ou, 0.5, b1, gou);
  c.expect(g1rep.all_ok, "Bakry-Emery margin (1D quadratic)");
  const ScalarField q2 = objective::catalog("quadratic_2d_paper");
  const auto b2 = pde::random_bumps(2, 10, seed + 2, 4.0);
  const auto g2rep =
      pde::gamma_calculus_check(q2, 0.1, b2, GridSpec::box(-6, 6, -6, 6, 81, 81));
  c.expect(g2rep.all_ok, "Bakry-Emery margin (2D quadratic)");
  for (double m : g1rep.min_margin) c.expect(m >= -1e-10, "1D nodewise margin " + fmt(m));
  for (double m : g2rep.min_margin) c.expect(m >= -1e-10, "2D nodewise margin " + fmt(m));

  const GridSpec ge = GridSpec::line(-6, 6, 1001);
  const double h = ge.spacing(0);
  for (int r = 0; r < 20; ++r) {
    const auto rho0 = normalized_mixture(ge, seed + 100 + r);
    const auto rep = pde::entropy_decay_check(ou, 0.5, rho0, ge, 0.4 * h * h / 0.5, 1.0);
    c.expect(rep.ck_min_margin >= -1e-8, "CK margin, start " + std::to_string(r));
    c.expect(rep.logsob_min_margin >= -1e-6, "log-Sobolev margin, start " + std::to_string(r));
  }
}

void criterion_coupling(Check& c, bool /*full*/, std::uint64_t seed) {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  int held = 0;
  for (int r = 0; r < 100; ++r)
    if (dynamics::coupled_deviation(q, 0.2, 2.0, 0.00125, NoiseModel{seed, static_cast<std::uint64_t>(r)})
            .bound_satisfied)
      ++held;
  c.expect(held == 100, "bound held on " + std::to_string(held) + "/100 seeds");

  std::vector<double> dev_hi, dev_lo;
  for (int r = 0; r < 100; ++r) {
    const NoiseModel n{seed, static_cast<std::uint64_t>(r)};
    dev_hi.push_back(dynamics::coupled_deviation(q, 0.1, 2.0, 0.00125, n).sup_deviation);
    dev_lo.push_back(dynamics::coupled_deviation(q, 0.025, 2.0, 0.00125, n).sup_deviation);
  }
  const double ratio = median(dev_hi) / median(dev_lo);
  c.expect(ratio >= 1.5 && ratio <= 2.7, "sqrt(s) scaling ratio " + fmt(ratio));
}

void criterion_decay_study(Check& c, bool /*full*/, std::uint64_t /*seed*/) {
  const double k01 = std::pow(10.0, cli::log10_threshold_step(1, 100 - 0.1, 0.1, 0.1, 0.1));
  c.expect(k01 >= 240 && k01 <= 260, "k_{0.1} = " + fmt(k01));
  const double lk = cli::log10_threshold_step(1, 100 - 0.001, 0.1, 0.001, 0.1);
  c.expect(std::fabs(lk - std::log10(2.5e47)) <= 0.3, "log10 k_{0.001} = " + fmt(lk));
  const double lratio = lk - std::log10(k01);
  c.expect(std::fabs(lratio - 45.0) <= 0.3, "log10 ratio = " + fmt(lratio));
  // consistency: at the threshold time the transient equals 0.1 a s
  const double lambda = std::exp(-0.1 / 0.1);
  const double t_star = std::log((100 - 0.1) / (0.1 * 1 * 0.1)) / lambda;
  const double risk = cli::idealized_risk(1, 100 - 0.1, 0.1, 0.1, t_star);
  c.expect(std::fabs((risk - 0.1) - 0.01) <= 1e-8, "risk at threshold " + fmt(risk));

  const ScalarField dw = objective::catalog("double_well_tilted");
  const GridSpec g = GridSpec::line(-2.5, 2.5, 600);
  const double h = g.spacing(0);
  const GridMeasure warm_mu = gibbs::gibbs_on_grid(dw, 0.2, g);
  // cold start: broad smooth profile far from either stationary measure
  std::vector<double> warm(g.size()), cold(g.size());
  double cold_mass = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    warm[i] = warm_mu.density(i);
    const double x = g.node(i)[0];
    cold[i] = std::exp(-0.5 * x * x / (0.9 * 0.9));
    cold_mass += cold[i] * g.weight(i);
  }
  for (auto& v : cold) v /= cold_mass;
  const double dt = 0.4 * h * h / 0.1;
  const auto t_warm = pde::time_to_stationarity(dw, 0.1, warm, g, 0.1, dt, 150.0);
  const auto t_cold = pde::time_to_stationarity(dw, 0.1, cold, g, 0.1, dt, 150.0);
  c.expect(!t_warm.censored && !t_cold.censored, "stationarity horizon");
  c.expect(t_warm.time < t_cold.time, "warm " + fmt(t_warm.time) + " vs cold " + fmt(t_cold.time));
}

void criterion_reproducibility(Check& c, bool /*full*/, std::uint64_t seed) {
  const ScalarField q = objective::make_quadratic_1d(1.0);
  const auto run_csv = [&] {
    return cli::ensemble_csv(dynamics::run_ensemble(dynamics::Method::sgd, q, 0.1, 500,
                                                    point1(1.0), 50, seed, 0.0));
  };
  c.expect(run_csv() == run_csv(), "ensemble CSV bytes");

  const ScalarField dw = objective::catalog("double_well_tilted");
  const GridSpec g = GridSpec::line(-4, 4, 800);
  const auto run_json = [&] {
    return cli::spectrum_json(spectral::smallest_eigs(spectral::assemble_witten(dw, 0.2, g), 3),
                              g);
  };
  c.expect(run_json() == run_json(), "spectrum JSON bytes");

  const auto run_morse = [&] {
    const GridSpec mg = GridSpec::line(-3, 3, 1001);
    return morse::to_json(morse::labeling(dw, morse::find_critical_points(dw, mg), mg));
  };
  c.expect(run_morse() == run_morse(), "landscape JSON bytes");
}

}  // namespace

SuiteReport run_suite(const std::string& suite, std::uint64_t seed) {
  if (suite != "fast" && suite != "full")
    throw std::invalid_argument("suite must be 'fast' or 'full'");
  const bool full = suite == "full";

  struct Entry {
    int id;
    const char* name;
    std::function<void(Check&, bool, std::uint64_t)> run;
  };
  const std::vector<Entry> entries{
      {1, "strongly convex spectral gap", criterion_spectral_gap},
      {2, "Eyring-Kramers exponential law", criterion_eyring_kramers},
      {3, "rate ratio arithmetic", criterion_lambda_ratio},
      {4, "hitting times vs escape formulas", criterion_hitting_time},
      {5, "Fokker-Planck closed-form oracle", criterion_fp_oracle},
      {6, "decay rate vs spectral gap", criterion_decay_consistency},
      {7, "weak error order", criterion_weak_error},
      {8, "stationary excess risk laws", criterion_epsilon_laws},
      {9, "landscape structure", criterion_morse_structure},
      {10, "functional inequalities", criterion_functional_inequalities},
      {11, "coupling bounds", criterion_coupling},
      {12, "learning-rate decay arithmetic", criterion_decay_study},
      {13, "reproducibility", criterion_reproducibility},
  };

  SuiteReport report;
  report.suite = suite;
  report.seed = seed;
  report.all_pass = true;
  for (const auto& e : entries) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(c, full, seed + static_cast<std::uint64_t>(e.id) * 1000);
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail << "exception: " << ex.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    r.pass = c.ok;
    r.detail = c.detail.str();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    report.all_pass &= r.pass;
    report.results.push_back(std::move(r));
  }
  return report;
}

std::string report_json(const SuiteReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["all_pass"] = report.all_pass;
  for (const auto& r : report.results) {
    nlohmann::json o;
    o["id"] = r.id;
    o["name"] = r.name;
    o["pass"] = r.pass;
    o["detail"] = r.detail;
    o["seconds"] = r.seconds;
    j["criteria"].push_back(o);
  }
  return j.dump(2);
}

}  // namespace sgdlab::acceptance
