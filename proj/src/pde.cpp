#include "sgdlab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sgdlab/noise.hpp"
#include "sgdlab/objective.hpp"

namespace sgdlab::pde {

namespace {

double trapezoid_mass(const GridSpec& g, const std::vector<double>& rho) {
  double m = 0;
  for (std::size_t i = 0; i < g.size(); ++i) m += g.weight(i) * rho[i];
  return m;
}

// Bernoulli function x / (e^x - 1), the exponential-fitting weight
double bernoulli_B(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 - 0.5 * x;
  if (x > 0) {
    const double e = std::exp(-x);
    return x * e / (1.0 - e);
  }
  return x / std::expm1(x);
}

// One backward-Euler line solve of the exponentially fitted (Scharfetter-
// Gummel) flux  J = c rho - D rho'  with no-flux ends; bl/bu hold B(-P)/B(P)
// per interior face, coef = dt D / h^2. The matrix is a tridiagonal M-matrix:
// the update conserves the plain sum and preserves positivity for any dt.
void fitted_solve_line(std::vector<double>& rhs, const double* bl, const double* bu,
                       double coef, std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  auto& c = scratch;  // modified super-diagonal
  c.resize(n);
  double diag = 1.0 + coef * bl[0];
  c[0] = -coef * bu[0] / diag;
  rhs[0] /= diag;
  for (std::size_t i = 1; i < n; ++i) {
    const double lower = -coef * bl[i - 1];
    diag = 1.0 + coef * (bu[i - 1] + (i + 1 == n ? 0.0 : bl[i])) - lower * c[i - 1];
    c[i] = (i + 1 == n ? 0.0 : -coef * bu[i]) / diag;
    rhs[i] = (rhs[i] - lower * rhs[i - 1]) / diag;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

struct Stepper {
  const ScalarField& field;
  const GridSpec& grid;
  double s, dt;
  // B(-P) and B(P) per interior face, P = -2 h grad f / s the face Peclet
  // number; the fitted flux is stationary exactly on e^{-2f/s}
  std::vector<double> bl_x, bu_x, bl_y, bu_y;
  std::vector<double> line;

  void face(double g, std::vector<double>& bl, std::vector<double>& bu, double h) {
    const double p = -2.0 * h * g / s;
    bl.push_back(bernoulli_B(-p));
    bu.push_back(bernoulli_B(p));
  }

  Stepper(const ScalarField& f, const GridSpec& g, double s_, double dt_)
      : field(f), grid(g), s(s_), dt(dt_) {
    const double hx = grid.spacing(0);
    if (grid.dimension == 1) {
      for (std::size_t i = 0; i + 1 < grid.n[0]; ++i)
        face(field.gradient(point1(grid.coord(0, i) + 0.5 * hx))[0], bl_x, bu_x, hx);
      return;
    }
    const double hy = grid.spacing(1);
    const std::size_t nx = grid.n[0], ny = grid.n[1];
    for (std::size_t ix = 0; ix + 1 < nx; ++ix)
      for (std::size_t iy = 0; iy < ny; ++iy)
        face(field.gradient(point2(grid.coord(0, ix) + 0.5 * hx, grid.coord(1, iy)))[0],
             bl_x, bu_x, hx);
    for (std::size_t ix = 0; ix < nx; ++ix)
      for (std::size_t iy = 0; iy + 1 < ny; ++iy)
        face(field.gradient(point2(grid.coord(0, ix), grid.coord(1, iy) + 0.5 * hy))[1],
             bl_y, bu_y, hy);
  }

  void step(std::vector<double>& rho) {
    const double hx = grid.spacing(0);
    if (grid.dimension == 1) {
      fitted_solve_line(rho, bl_x.data(), bu_x.data(), dt * 0.5 * s / (hx * hx), line);
      return;
    }
    // dimension splitting: one implicit line solve per row and column
    const double hy = grid.spacing(1);
    const std::size_t nx = grid.n[0], ny = grid.n[1];
    const double ax = dt * 0.5 * s / (hx * hx), ay = dt * 0.5 * s / (hy * hy);
    std::vector<double> col(nx), blc(nx - 1), buc(nx - 1);
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) col[ix] = rho[ix * ny + iy];
      for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
        blc[ix] = bl_x[ix * ny + iy];
        buc[ix] = bu_x[ix * ny + iy];
      }
      fitted_solve_line(col, blc.data(), buc.data(), ax, line);
      for (std::size_t ix = 0; ix < nx; ++ix) rho[ix * ny + iy] = col[ix];
    }
    std::vector<double> row(ny);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      for (std::size_t iy = 0; iy < ny; ++iy) row[iy] = rho[ix * ny + iy];
      fitted_solve_line(row, bl_y.data() + ix * (ny - 1), bu_y.data() + ix * (ny - 1),
                        ay, line);
      for (std::size_t iy = 0; iy < ny; ++iy) rho[ix * ny + iy] = row[iy];
    }
  }
};

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y,
                           double* intercept, double* r2) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  if (intercept) *intercept = my - slope * mx;
  if (r2) *r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return slope;
}

double measure_integral(const GridMeasure& mu, const std::vector<double>& vals) {
  double acc = 0;
  for (std::size_t i = 0; i < vals.size(); ++i)
    acc += mu.grid.weight(i) * std::exp(mu.log_density[i]) * vals[i];
  return acc;
}

}  // namespace

std::vector<TestFunction> random_bumps(int dimension, int count, std::uint64_t seed,
                                       double radius) {
  struct Bump {
    Point c;
    double w, a;
  };
  std::vector<TestFunction> fns;
  const NoiseModel rng{seed, 0};
  std::uint64_t draw = 0;
  const auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * rng.uniform(draw++, 0);
  };
  for (int i = 0; i < count; ++i) {
    std::vector<Bump> bumps;
    const int nb = 2 + static_cast<int>(u(0, 1) * 2);
    for (int b = 0; b < nb; ++b) {
      Bump bump;
      bump.c[0] = u(-0.5 * radius, 0.5 * radius);
      bump.c[1] = dimension == 2 ? u(-0.5 * radius, 0.5 * radius) : 0.0;
      bump.w = u(0.15 * radius, 0.4 * radius);
      bump.a = u(-2.0, 2.0);
      bumps.push_back(bump);
    }
    TestFunction fn;
    fn.value = [bumps, dimension](const Point& x) {
      double v = 0;
      for (const auto& b : bumps) {
        Point d{x[0] - b.c[0], x[1] - b.c[1]};
        const double q = dot(d, d, dimension) / (2 * b.w * b.w);
        v += b.a * std::exp(-q);
      }
      return v;
    };
    fn.gradient = [bumps, dimension](const Point& x) {
      Point g{0, 0};
      for (const auto& b : bumps) {
        Point d{x[0] - b.c[0], x[1] - b.c[1]};
        const double q = dot(d, d, dimension) / (2 * b.w * b.w);
        const double e = b.a * std::exp(-q) / (b.w * b.w);
        g[0] -= e * d[0];
        if (dimension == 2) g[1] -= e * d[1];
      }
      return g;
    };
    fn.hessian = [bumps, dimension](const Point& x) {
      SymMat h;
      for (const auto& b : bumps) {
        Point d{x[0] - b.c[0], x[1] - b.c[1]};
        const double w2 = b.w * b.w;
        const double q = dot(d, d, dimension) / (2 * w2);
        const double e = b.a * std::exp(-q);
        h.a11 += e * (d[0] * d[0] / (w2 * w2) - 1.0 / w2);
        if (dimension == 2) {
          h.a12 += e * d[0] * d[1] / (w2 * w2);
          h.a22 += e * (d[1] * d[1] / (w2 * w2) - 1.0 / w2);
        }
      }
      return h;
    };
    fns.push_back(std::move(fn));
  }
  return fns;
}

std::vector<DensitySnapshot> fp_evolve(const ScalarField& field, double s,
                                       const std::vector<double>& rho0,
                                       const GridSpec& grid, double dt, double T,
                                       int n_snapshots) {
  grid.validate();
  if (rho0.size() != grid.size()) throw ConfigurationError("rho0 size mismatch");
  if (dt <= 0 || T <= 0 || n_snapshots < 2)
    throw ConfigurationError("need positive dt, T and at least 2 snapshots");
  if (std::fabs(trapezoid_mass(grid, rho0) - 1.0) > 1e-4)
    throw ConfigurationError("rho0 is not normalized");
  gibbs::gibbs_on_grid(field, s, grid);  // certifies the truncation box

  const auto n_steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
  Stepper stepper(field, grid, s, T / static_cast<double>(n_steps));

  std::vector<DensitySnapshot> out;
  std::vector<double> rho = rho0;
  std::size_t next_snap = 0;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    while (next_snap < static_cast<std::size_t>(n_snapshots) &&
           static_cast<std::size_t>(std::llround(
               static_cast<double>(next_snap) * static_cast<double>(n_steps) /
               (n_snapshots - 1))) == k) {
      out.push_back({static_cast<double>(k) * stepper.dt, rho});
      ++next_snap;
    }
    if (k == n_steps) break;
    stepper.step(rho);
    if (*std::min_element(rho.begin(), rho.end()) < -1e-12)
      throw SchemeError("negative density produced by the scheme");
  }
  const double drift = std::fabs(trapezoid_mass(grid, rho) - 1.0);
  if (drift > 1e-6 * std::max(1.0, T))
    throw SchemeError("mass drift " + std::to_string(drift));
  return out;
}

DensitySnapshot ou_closed_form(double theta, double s, double x0, double t,
                               const GridSpec& grid) {
  if (t <= 0) throw ConfigurationError("t must be positive");
  if (grid.dimension != 1) throw ConfigurationError("closed form is 1D");
  DensitySnapshot snap;
  snap.time = t;
  snap.density.resize(grid.size());
  const double decay = std::exp(-theta * t);
  const double spread = 1.0 - std::exp(-2.0 * theta * t);
  const double norm_c = std::sqrt(theta / (std::numbers::pi * s * spread));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.coord(0, i);
    const double d = x - x0 * decay;
    snap.density[i] = norm_c * std::exp(-(theta / s) * d * d / spread);
  }
  return snap;
}

DecayFit decay_fit(const ScalarField& field, double s, const std::vector<double>& rho0,
                   const GridSpec& grid, double dt, double T, double lambda_ref) {
  const GridMeasure mu = gibbs::gibbs_on_grid(field, s, grid);
  const auto snaps = fp_evolve(field, s, rho0, grid, dt, T, 60);

  DecayFit fit;
  fit.reference_rate = 2.0 * lambda_ref;
  std::vector<double> excess;
  std::vector<double> fvals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) fvals[i] = field.value(grid.node(i));
  const double f_inf = measure_integral(mu, fvals);
  const double eps = gibbs::epsilon_of_s(field, s, grid);
  const double fstar = f_inf - eps;
  for (const auto& snap : snaps) {
    fit.times.push_back(snap.time);
    const double d = gibbs::weighted_l2_distance(snap.density, mu);
    fit.norms.push_back(d * d);
    double e = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      e += grid.weight(i) * snap.density[i] * fvals[i];
    excess.push_back(e - fstar);
  }

  // late-window fit of log norm^2 vs t
  std::vector<double> tx, ty;
  for (std::size_t i = 0; i < snaps.size(); ++i)
    if (fit.times[i] >= 0.5 * T && fit.norms[i] > 1e-250) {
      tx.push_back(fit.times[i]);
      ty.push_back(std::log(fit.norms[i]));
    }
  if (tx.size() < 5 || fit.norms.front() < 1e-12) {
    fit.conclusive = false;
    return fit;
  }
  fit.window = {tx.front(), tx.back()};
  fit.fitted_rate = -least_squares_slope(tx, ty, nullptr, &fit.fit_r2);

  // excess-risk fit  E f - f* = eps + D e^{-rate t}
  std::vector<double> ex, ey;
  for (std::size_t i = 0; i < excess.size(); ++i)
    if (excess[i] - eps > 1e-14) {
      ex.push_back(fit.times[i]);
      ey.push_back(std::log(excess[i] - eps));
    }
  if (ex.size() >= 5) {
    double logD = 0;
    fit.excess_rate = -least_squares_slope(ex, ey, &logD, nullptr);
    fit.excess_D = std::exp(logD);
  }
  return fit;
}

StationarityTime time_to_stationarity(const ScalarField& field, double s,
                                      const std::vector<double>& rho0,
                                      const GridSpec& grid, double delta, double dt,
                                      double T_max) {
  if (delta <= 0 || delta >= 1) throw ConfigurationError("delta must lie in (0,1)");
  const GridMeasure mu = gibbs::gibbs_on_grid(field, s, grid);
  std::vector<double> fvals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) fvals[i] = field.value(grid.node(i));
  const double f_inf = measure_integral(mu, fvals);
  const double eps = gibbs::epsilon_of_s(field, s, grid);
  if (eps <= 0) throw ConfigurationError("epsilon(s) must be positive");

  const auto snaps = fp_evolve(field, s, rho0, grid, dt, T_max, 400);
  for (const auto& snap : snaps) {
    double e = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      e += grid.weight(i) * snap.density[i] * fvals[i];
    if (std::fabs(e - f_inf) <= delta * eps) return {snap.time, false};
  }
  return {T_max, true};
}

MarginReport key_inequality_check(const ScalarField& field, double s,
                                  const std::vector<TestFunction>& test_fns,
                                  const GridSpec& grid) {
  const GridMeasure mu = gibbs::gibbs_on_grid(field, s, grid);
  MarginReport rep;
  for (const auto& h : test_fns) {
    const double mean = mu.integrate(h.value);
    const double lhs = mu.integrate([&](const Point& x) {
      const double c = h.value(x) - mean;
      return objective::schrodinger_potential(field, s, x) * c * c;
    });
    const double rhs = s * mu.integrate([&](const Point& x) {
      const Point g = h.gradient(x);
      return dot(g, g, field.dimension);
    });
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.margin.push_back(rhs - lhs);
    if (rhs - lhs < -1e-6 * std::max(1.0, std::fabs(rhs))) rep.all_ok = false;
  }
  return rep;
}

MarginReport poincare_check(const ScalarField& field, double s, double lambda_s,
                            const std::vector<TestFunction>& test_fns,
                            const GridSpec& grid) {
  if (lambda_s <= 0) throw ConfigurationError("lambda_s must be positive");
  const GridMeasure mu = gibbs::gibbs_on_grid(field, s, grid);
  MarginReport rep;
  for (const auto& h : test_fns) {
    const double mean = mu.integrate(h.value);
    const double var = mu.integrate([&](const Point& x) {
      const double c = h.value(x) - mean;
      return c * c;
    });
    const double rhs = s / (2.0 * lambda_s) * mu.integrate([&](const Point& x) {
      const Point g = h.gradient(x);
      return dot(g, g, field.dimension);
    });
    rep.lhs.push_back(var);
    rep.rhs.push_back(rhs);
    rep.margin.push_back(rhs - var);
    if (rhs - var < -1e-6 * std::max(1.0, std::fabs(rhs))) rep.all_ok = false;
  }
  return rep;
}

GammaReport gamma_calculus_check(const ScalarField& field, double s,
                                 const std::vector<TestFunction>& g_fns,
                                 const GridSpec& grid) {
  GammaReport rep;
  rep.curvature_asserted = field.strong_convexity_mu.has_value();
  const double mu = field.strong_convexity_mu.value_or(0.0);
  for (const auto& g : g_fns) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Point x = grid.node(i);
      const Point dg = g.gradient(x);
      const SymMat hf = field.hessian(x);
      const SymMat hg = g.hessian(x);
      const double gamma = 0.5 * s * dot(dg, dg, field.dimension);
      double quad = hf.a11 * dg[0] * dg[0];
      double frob = hg.a11 * hg.a11;
      if (field.dimension == 2) {
        quad += 2 * hf.a12 * dg[0] * dg[1] + hf.a22 * dg[1] * dg[1];
        frob += 2 * hg.a12 * hg.a12 + hg.a22 * hg.a22;
      }
      const double gamma2 = 0.5 * s * quad + 0.25 * s * s * frob;
      worst = std::min(worst, gamma2 - mu * gamma);
    }
    rep.min_margin.push_back(worst);
    if (rep.curvature_asserted && worst < -1e-10) rep.all_ok = false;
  }
  return rep;
}

EntropyDecayReport entropy_decay_check(const ScalarField& field, double s,
                                       const std::vector<double>& rho0,
                                       const GridSpec& grid, double dt, double T) {
  if (!field.strong_convexity_mu)
    throw ConfigurationError("field must declare strong_convexity_mu");
  const GridMeasure mu = gibbs::gibbs_on_grid(field, s, grid);
  const auto snaps = fp_evolve(field, s, rho0, grid, dt, T, 40);

  EntropyDecayReport rep;
  rep.ck_min_margin = std::numeric_limits<double>::infinity();
  rep.logsob_min_margin = std::numeric_limits<double>::infinity();
  const double hx = grid.spacing(0);
  for (const auto& snap : snaps) {
    rep.times.push_back(snap.time);
    double l1 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      l1 += grid.weight(i) * std::fabs(snap.density[i] - std::exp(mu.log_density[i]));
    rep.l1_distance.push_back(l1);
    const double H = gibbs::relative_entropy(snap.density, mu);
    rep.entropy.push_back(H);
    rep.ck_min_margin = std::min(rep.ck_min_margin, 2.0 * H - l1 * l1);

    // log-Sobolev with h = sqrt(rho/mu): Ent[h^2] vs (s/mu) Dirichlet
    std::vector<double> h(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double lm = std::max(mu.log_density[i], -690.0);
      h[i] = std::sqrt(std::max(snap.density[i], 0.0) / std::exp(lm));
    }
    double dirichlet = 0;
    if (grid.dimension == 1) {
      for (std::size_t i = 1; i + 1 < grid.n[0]; ++i) {
        const double dh = (h[i + 1] - h[i - 1]) / (2 * hx);
        dirichlet += grid.weight(i) * std::exp(mu.log_density[i]) * dh * dh;
      }
    } else {
      const double hy = grid.spacing(1);
      const std::size_t ny = grid.n[1];
      for (std::size_t ix = 1; ix + 1 < grid.n[0]; ++ix)
        for (std::size_t iy = 1; iy + 1 < ny; ++iy) {
          const std::size_t a = ix * ny + iy;
          const double dx = (h[a + ny] - h[a - ny]) / (2 * hx);
          const double dy = (h[a + 1] - h[a - 1]) / (2 * hy);
          dirichlet += grid.weight(a) * std::exp(mu.log_density[a]) * (dx * dx + dy * dy);
        }
    }
    rep.logsob_min_margin = std::min(
        rep.logsob_min_margin, s / *field.strong_convexity_mu * dirichlet - H);
  }

  std::vector<double> tx, ty;
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    if (rep.entropy[i] > 1e-13) {
      tx.push_back(rep.times[i]);
      ty.push_back(std::log(rep.entropy[i]));
    }
  if (tx.size() >= 5) rep.fitted_entropy_rate = -least_squares_slope(tx, ty, nullptr, nullptr);
  rep.ok = rep.ck_min_margin >= -1e-8 && rep.logsob_min_margin >= -1e-6;
  return rep;
}

}  // namespace sgdlab::pde
