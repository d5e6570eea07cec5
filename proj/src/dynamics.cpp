#include "sgdlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgdlab::dynamics {

namespace {

constexpr double kDivergenceNorm = 1e8;

void check_finite(const Point& x, const Point& prev, std::uint64_t k, int dim) {
  if (!std::isfinite(x[0]) || (dim == 2 && !std::isfinite(x[1])) ||
      norm(x, dim) > kDivergenceNorm)
    throw DivergenceError(prev, k);
}

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0) return 1.0;
  if (x < a + 1.0) {
    // series for P(a,x)
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // continued fraction for Q(a,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

Trajectory run_discrete(Method method, const ScalarField& field, double s,
                        std::uint64_t k_max, Point x0, const NoiseModel& noise) {
  if (s <= 0) throw ConfigurationError("learning rate must be positive");
  const int dim = field.dimension;
  Trajectory traj;
  traj.times.reserve(k_max + 1);
  traj.states.reserve(k_max + 1);
  traj.objective_values.reserve(k_max + 1);

  Point x = x0;
  const double sqrt_s = std::sqrt(s);
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    traj.times.push_back(static_cast<double>(k) * s);
    traj.states.push_back(x);
    traj.objective_values.push_back(field.value(x));
    if (k == k_max) break;

    const Point g = field.gradient(x);
    Point next = x;
    for (int c = 0; c < dim; ++c) {
      double step = -s * g[c];
      if (method == Method::sgd) step -= s * noise.gaussian(k, c);
      if (method == Method::sgld) step += sqrt_s * noise.gaussian(k, c);
      next[c] += step;
    }
    check_finite(next, x, k + 1, dim);
    x = next;
  }
  return traj;
}

Trajectory euler_maruyama(const ScalarField& field, double s, double dt, double T,
                          Point x0, const NoiseModel& noise) {
  if (dt <= 0 || T <= 0) throw ConfigurationError("dt and T must be positive");
  if (s > 0 && dt > s / 10 * (1 + 1e-12))
    throw ConfigurationError("inner step dt must satisfy dt <= s/10");
  const int dim = field.dimension;
  const auto n_steps = static_cast<std::uint64_t>(std::llround(T / dt));

  Trajectory traj;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.objective_values.reserve(n_steps + 1);

  Point x = x0;
  const double diff = std::sqrt(s) * std::sqrt(dt);
  for (std::uint64_t k = 0; k <= n_steps; ++k) {
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(x);
    traj.objective_values.push_back(field.value(x));
    if (k == n_steps) break;

    const Point g = field.gradient(x);
    Point next = x;
    for (int c = 0; c < dim; ++c) {
      next[c] += -g[c] * dt;
      if (s > 0) next[c] += diff * noise.gaussian(k, c);
    }
    check_finite(next, x, k + 1, dim);
    x = next;
  }
  return traj;
}

EnsembleStats run_ensemble(Method method, const ScalarField& field, double s,
                           std::uint64_t k_max, Point x0, int n_replicas,
                           std::uint64_t base_seed, double f_star) {
  if (n_replicas < 2) throw ConfigurationError("need at least 2 replicas");
  const int dim = field.dimension;
  const double sqrt_s = std::sqrt(s);

  std::vector<double> sum(k_max + 1, 0.0), sum_sq(k_max + 1, 0.0);
  for (int r = 0; r < n_replicas; ++r) {
    const NoiseModel noise{base_seed, static_cast<std::uint64_t>(r)};
    Point x = x0;
    for (std::uint64_t k = 0; k <= k_max; ++k) {
      const double e = field.value(x) - f_star;
      sum[k] += e;
      sum_sq[k] += e * e;
      if (k == k_max) break;
      const Point g = field.gradient(x);
      Point next = x;
      for (int c = 0; c < dim; ++c) {
        double step = -s * g[c];
        if (method == Method::sgd) step -= s * noise.gaussian(k, c);
        if (method == Method::sgld) step += sqrt_s * noise.gaussian(k, c);
        next[c] += step;
      }
      try {
        check_finite(next, x, k + 1, dim);
      } catch (DivergenceError&) {
        throw ConfigurationError("replica " + std::to_string(r) + " diverged at step " +
                                 std::to_string(k + 1));
      }
      x = next;
    }
  }

  EnsembleStats stats;
  stats.n_replicas = n_replicas;
  const double n = n_replicas;
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    stats.times.push_back(static_cast<double>(k) * s);
    const double mean = sum[k] / n;
    stats.mean_excess_risk.push_back(mean);
    const double var = std::max(0.0, sum_sq[k] / n - mean * mean);
    stats.std_err.push_back(std::sqrt(var / n));
  }
  return stats;
}

WeakErrorStudy weak_error_study(const ScalarField& field,
                                const std::vector<double>& s_list, double T,
                                int n_replicas, double dt_ref, Point x0,
                                std::uint64_t base_seed, double noise_scale) {
  if (s_list.empty()) throw ConfigurationError("empty s list");
  const double s_min = *std::min_element(s_list.begin(), s_list.end());
  if (dt_ref > s_min / 20 * (1 + 1e-12))
    throw ConfigurationError("dt_ref must satisfy dt_ref <= min(s)/20");
  if (field.lipschitz_L)
    for (double s : s_list)
      if (s > 1.0 / *field.lipschitz_L + 1e-12)
        throw ConfigurationError("all s must satisfy s <= 1/L");
  const int dim = field.dimension;

  WeakErrorStudy study;
  study.s_values = s_list;
  for (double s : s_list) {
    const auto m = static_cast<std::uint64_t>(std::ceil(s / dt_ref - 1e-12));
    const double dt = s / static_cast<double>(m);
    const auto k_max = static_cast<std::uint64_t>(std::llround(T / s));
    const double sqrt_dt = std::sqrt(dt), sqrt_s = std::sqrt(s);

    std::vector<double> diff_sum(k_max + 1, 0.0), diff_sq(k_max + 1, 0.0);
    for (int r = 0; r < n_replicas; ++r) {
      const NoiseModel noise{base_seed, static_cast<std::uint64_t>(r), noise_scale};
      Point xc = x0;  // coarse SGD iterate
      Point xf = x0;  // fine SDE state
      for (std::uint64_t k = 0; k < k_max; ++k) {
        Point w_step{0, 0};
        for (std::uint64_t j = 0; j < m; ++j) {
          const Point g = field.gradient(xf);
          for (int c = 0; c < dim; ++c) {
            const double dW = sqrt_dt * noise.gaussian(k * m + j, c);
            xf[c] += -g[c] * dt + sqrt_s * dW;
            w_step[c] += dW;
          }
        }
        // common random numbers: the SGD noise is the coarse Brownian increment
        const Point g = field.gradient(xc);
        for (int c = 0; c < dim; ++c) {
          const double xi = -w_step[c] / sqrt_s;
          xc[c] += -s * g[c] - s * xi;
        }
        const double d = field.value(xc) - field.value(xf);
        diff_sum[k + 1] += d;
        diff_sq[k + 1] += d * d;
      }
    }
    double err = 0, err_se = 0;
    for (std::uint64_t k = 1; k <= k_max; ++k) {
      const double mean = diff_sum[k] / n_replicas;
      if (std::fabs(mean) > err) {
        err = std::fabs(mean);
        const double var =
            std::max(0.0, diff_sq[k] / n_replicas - mean * mean);
        err_se = std::sqrt(var / n_replicas);
      }
    }
    study.errors.push_back(err);
    if (err < 3 * err_se) study.conclusive = false;
  }

  // least squares slope of log err vs log s
  const std::size_t n = s_list.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(s_list[i]);
    my += std::log(std::max(study.errors[i], 1e-300));
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(s_list[i]) - mx;
    num += dx * (std::log(std::max(study.errors[i], 1e-300)) - my);
    den += dx * dx;
  }
  study.fitted_order = num / den;
  return study;
}

HittingTime hitting_time_mc(const ScalarField& field, double s, double x_start,
                            double x_target, int n_replicas, double dt,
                            double max_time, std::uint64_t base_seed) {
  if (field.dimension != 1) throw ConfigurationError("hitting times are 1D only");
  if (x_start == x_target) throw ConfigurationError("start and target coincide");
  const auto n_steps = static_cast<std::uint64_t>(std::llround(max_time / dt));
  const double diff = std::sqrt(s * dt);

  HittingTime result;
  double sum = 0, sum_sq = 0;
  for (int r = 0; r < n_replicas; ++r) {
    const NoiseModel noise{base_seed, static_cast<std::uint64_t>(r)};
    double x = x_start;
    bool hit = false;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
      const double g = field.gradient(point1(x))[0];
      const double xn = x - g * dt + diff * noise.gaussian(k, 0);
      double frac = -1;
      if ((x - x_target) * (xn - x_target) <= 0.0) {
        // linear interpolation of the crossing inside the step
        frac = (xn == x) ? 0.0 : (x_target - x) / (xn - x);
      } else if (s > 0) {
        // Brownian bridge: the path may have touched the level between
        // endpoints that both stayed on one side; discrete monitoring alone
        // overestimates the passage time
        const double p = std::exp(-2.0 * (x_target - x) * (x_target - xn) / (s * dt));
        if (noise.uniform(k, 1) < p) frac = 0.5;
      }
      if (frac >= 0) {
        const double t = (static_cast<double>(k) + frac) * dt;
        sum += t;
        sum_sq += t * t;
        ++result.n_hit;
        hit = true;
        break;
      }
      x = xn;
    }
    if (!hit) ++result.n_censored;
  }
  if (result.n_hit > 0) {
    result.mean = sum / result.n_hit;
    const double var = std::max(0.0, sum_sq / result.n_hit - result.mean * result.mean);
    result.std_err = std::sqrt(var / result.n_hit);
  }
  result.conclusive = result.n_censored * 2 <= n_replicas;
  return result;
}

double kramers_time(const ScalarField& field, double x_bullet, double x_circ, double s) {
  if (field.dimension != 1) throw ConfigurationError("kramers_time is 1D only");
  const double a = field.hessian(point1(x_bullet)).a11;
  const double b = field.hessian(point1(x_circ)).a11;
  if (a <= 0 || b >= 0)
    throw std::domain_error("kramers_time needs f''(x_bullet) > 0 and f''(x_circ) < 0");
  const double barrier = field.value(point1(x_circ)) - field.value(point1(x_bullet));
  return std::numbers::pi / std::sqrt(-a * b) * std::exp(2.0 * barrier / s);
}

CouplingReport coupled_deviation(const ScalarField& field, double s, double T,
                                 double dt, const NoiseModel& noise) {
  if (!field.lipschitz_L) throw ConfigurationError("field must declare lipschitz_L");
  const double L = *field.lipschitz_L;
  const int dim = field.dimension;
  const auto n_steps = static_cast<std::uint64_t>(std::llround(T / dt));
  const double sqrt_dt = std::sqrt(dt), sqrt_s = std::sqrt(s);

  Point xs{0, 0}, x0{0, 0}, w{0, 0};
  // both paths start at the origin of the coupling experiment
  CouplingReport rep;
  rep.s = s;
  rep.horizon_T = T;
  for (std::uint64_t k = 0; k < n_steps; ++k) {
    const Point gs = field.gradient(xs);
    const Point g0 = field.gradient(x0);
    for (int c = 0; c < dim; ++c) {
      const double dW = sqrt_dt * noise.gaussian(k, c);
      w[c] += dW;
      xs[c] += -gs[c] * dt + sqrt_s * dW;
      x0[c] += -g0[c] * dt;
    }
    Point d{xs[0] - x0[0], xs[1] - x0[1]};
    rep.sup_deviation = std::max(rep.sup_deviation, norm(d, dim));
    rep.noise_sup = std::max(rep.noise_sup, norm(w, dim));
  }
  rep.bound_value = sqrt_s * rep.noise_sup * std::exp(L * T);
  rep.observed_accum = rep.bound_value;
  rep.bound_satisfied = rep.sup_deviation <= rep.bound_value;
  return rep;
}

CouplingReport discrete_coupled_deviation(const ScalarField& field, double s,
                                          double T, const NoiseModel& noise) {
  if (!field.lipschitz_L) throw ConfigurationError("field must declare lipschitz_L");
  const double L = *field.lipschitz_L;
  const int dim = field.dimension;
  const auto k_max = static_cast<std::uint64_t>(std::llround(T / s));

  Point xs{0, 0}, x0{0, 0};
  CouplingReport rep;
  rep.s = s;
  rep.horizon_T = T;
  double accum = 0;  // recursion a_k = (1+Ls) a_{k-1} + s |xi_k|
  for (std::uint64_t k = 0; k < k_max; ++k) {
    const Point gs = field.gradient(xs);
    const Point g0 = field.gradient(x0);
    Point xi{0, 0};
    for (int c = 0; c < dim; ++c) {
      xi[c] = noise.gaussian(k, c);
      xs[c] += -s * gs[c] - s * xi[c];
      x0[c] += -s * g0[c];
    }
    const double xi_norm = norm(xi, dim);
    rep.noise_sup = std::max(rep.noise_sup, xi_norm);
    accum = (1.0 + L * s) * accum + s * xi_norm;
    rep.observed_accum = std::max(rep.observed_accum, accum);
    Point d{xs[0] - x0[0], xs[1] - x0[1]};
    rep.sup_deviation = std::max(rep.sup_deviation, norm(d, dim));
  }
  rep.bound_value =
      s * std::pow(1.0 + L * s, static_cast<double>(k_max)) * rep.noise_sup;
  rep.bound_satisfied = rep.sup_deviation <= rep.bound_value;
  return rep;
}

GaussianTail gaussian_norm_tail(int d, double x) {
  if (d <= 0) throw std::domain_error("dimension must be positive");
  if (x <= 0) throw std::domain_error("x must be positive");
  GaussianTail t;
  const double a = 0.5 * d;
  t.probability = gamma_q(a, 0.5 * x * x);
  t.bound = 4.0 * std::pow(x, d - 2) * std::exp(-0.5 * x * x) /
            (std::pow(2.0, a) * std::tgamma(a));
  return t;
}

}  // namespace sgdlab::dynamics
