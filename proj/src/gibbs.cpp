#include "sgdlab/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgdlab/kernels.hpp"
#include "sgdlab/objective.hpp"

namespace sgdlab {

double GridMeasure::density(std::size_t idx) const { return std::exp(log_density[idx]); }

double GridMeasure::integrate(const std::function<double(const Point&)>& g) const {
  double acc = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc += grid.weight(i) * std::exp(log_density[i]) * g(grid.node(i));
  return acc;
}

}  // namespace sgdlab

namespace sgdlab::gibbs {

namespace {

constexpr double kBoundaryLogTol = -27.631021115928547;  // log(1e-12)
constexpr double kLogFloor = -690.0;                     // below this mu counts as zero

std::vector<double> node_values(const ScalarField& field, const GridSpec& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = field.value(grid.node(i));
  return f;
}

bool boundary_ok(const ScalarField& field, double s, const GridSpec& grid,
                 const std::vector<double>& f) {
  const double fmin = *std::min_element(f.begin(), f.end());
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.on_boundary(i) && -2.0 * (f[i] - fmin) / s >= kBoundaryLogTol) return false;
  return true;
}

double refined_fstar(const ScalarField& field, const GridSpec& grid,
                     const std::vector<double>& f) {
  const auto best = std::min_element(f.begin(), f.end()) - f.begin();
  const Point x = objective::newton_refine(field, grid.node(best));
  return field.value(x);
}

}  // namespace

GridMeasure gibbs_on_grid(const ScalarField& field, double s, const GridSpec& grid) {
  if (s <= 0) throw std::invalid_argument("s must be positive");
  grid.validate();
  if (grid.dimension != field.dimension)
    throw std::invalid_argument("grid and field dimensions disagree");
  const auto f = node_values(field, grid);
  if (!boundary_ok(field, s, grid, f))
    throw TruncationError("boundary mass criterion violated; enlarge the box");

  GridMeasure mu;
  mu.grid = grid;
  mu.s = s;
  mu.log_density.resize(grid.size());
  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mu.log_density[i] = -2.0 * f[i] / s;
    terms[i] = mu.log_density[i] + std::log(grid.weight(i));
  }
  mu.log_Z = kernels::logsumexp(terms.data(), terms.size());
  mu.Z_s = std::exp(mu.log_Z);
  for (auto& ld : mu.log_density) ld -= mu.log_Z;
  return mu;
}

GridSpec default_box(const ScalarField& field, double s, std::size_t nodes, double start) {
  for (double R = start; R <= 4096.0; R *= 2.0) {
    GridSpec g = field.dimension == 1
                     ? GridSpec::line(-R, R, nodes)
                     : GridSpec::box(-R, R, -R, R, nodes, nodes);
    if (boundary_ok(field, s, g, node_values(field, g))) return g;
  }
  throw TruncationError("no certified box up to radius 4096");
}

double epsilon_of_s(const ScalarField& field, double s, const GridSpec& grid) {
  const GridMeasure mu = gibbs_on_grid(field, s, grid);
  const double fstar = refined_fstar(field, grid, node_values(field, grid));
  return mu.integrate([&](const Point& p) { return field.value(p) - fstar; });
}

double epsilon_derivative(const ScalarField& field, double s, const GridSpec& grid) {
  const GridMeasure mu = gibbs_on_grid(field, s, grid);
  const double fstar = refined_fstar(field, grid, node_values(field, grid));
  const double m1 = mu.integrate([&](const Point& p) { return field.value(p) - fstar; });
  const double m2 = mu.integrate([&](const Point& p) {
    const double g = field.value(p) - fstar;
    return g * g;
  });
  return 2.0 / (s * s) * std::max(0.0, m2 - m1 * m1);
}

double c_of_s(const ScalarField& field, double s, const GridSpec& grid) {
  const GridMeasure mu = gibbs_on_grid(field, s, grid);
  const double fstar = refined_fstar(field, grid, node_values(field, grid));
  return std::sqrt(mu.integrate([&](const Point& p) {
    const double g = field.value(p) - fstar;
    return g * g;
  }));
}

double weighted_l2_distance(const std::vector<double>& rho, const GridMeasure& mu) {
  if (rho.size() != mu.grid.size())
    throw std::invalid_argument("density and measure grids disagree");
  // ||rho - mu||^2_{mu^{-1}} = integral rho^2/mu - 1
  std::vector<double> terms;
  terms.reserve(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] < 0) throw std::invalid_argument("negative density node");
    if (rho[i] == 0) continue;
    if (mu.log_density[i] < kLogFloor && rho[i] > 1e-12)
      throw NormOverflowError("density not in L2 of the inverse measure");
    terms.push_back(2.0 * std::log(rho[i]) - mu.log_density[i] +
                    std::log(mu.grid.weight(i)));
  }
  if (terms.empty()) return 0.0;
  const double lse = kernels::logsumexp(terms.data(), terms.size());
  return std::sqrt(std::max(0.0, std::exp(lse) - 1.0));
}

double cross_norm(const ScalarField& field, double s1, double s2, const GridSpec& grid) {
  if (s2 <= 0 || s1 < s2) throw std::invalid_argument("need s1 >= s2 > 0");
  const GridMeasure mu1 = gibbs_on_grid(field, s1, grid);
  const GridMeasure mu2 = gibbs_on_grid(field, s2, grid);

  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    t[i] = 2.0 * mu1.log_density[i] - mu2.log_density[i];

  // the integrand must peak in the interior, not grow toward the boundary
  double peak = -std::numeric_limits<double>::infinity();
  double bnd = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double& slot = grid.on_boundary(i) ? bnd : peak;
    slot = std::max(slot, t[i]);
  }
  if (bnd >= peak)
    throw NormOverflowError("cross-norm integrand grows at the boundary");

  std::vector<double> terms(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    terms[i] = t[i] + std::log(grid.weight(i));
  const double lse = kernels::logsumexp(terms.data(), terms.size());
  return std::sqrt(std::max(0.0, std::exp(lse) - 1.0));
}

double relative_entropy(const std::vector<double>& rho, const GridMeasure& mu) {
  if (rho.size() != mu.grid.size())
    throw std::invalid_argument("density and measure grids disagree");
  double h = 0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= 0) continue;  // 0 log 0 = 0
    if (mu.log_density[i] < kLogFloor)
      throw std::domain_error("density not absolutely continuous on the grid");
    h += mu.grid.weight(i) * rho[i] * (std::log(rho[i]) - mu.log_density[i]);
  }
  return h;
}

double stationarity_residual(const ScalarField& field, const GridMeasure& mu) {
  const GridSpec& g = mu.grid;
  const double s = mu.s;
  const auto rho = [&](std::size_t i) { return std::exp(mu.log_density[i]); };
  double worst = 0;

  if (g.dimension == 1) {
    const double h = g.spacing(0);
    for (std::size_t i = 1; i + 1 < g.n[0]; ++i) {
      const double jp = rho(i + 1) * field.gradient(g.node(i + 1))[0];
      const double jm = rho(i - 1) * field.gradient(g.node(i - 1))[0];
      const double r = (jp - jm) / (2 * h) +
                       0.5 * s * (rho(i + 1) - 2 * rho(i) + rho(i - 1)) / (h * h);
      worst = std::max(worst, std::fabs(r));
    }
    return worst;
  }

  const double hx = g.spacing(0), hy = g.spacing(1);
  const std::size_t ny = g.n[1];
  const auto at = [&](std::size_t ix, std::size_t iy) { return ix * ny + iy; };
  for (std::size_t ix = 1; ix + 1 < g.n[0]; ++ix) {
    for (std::size_t iy = 1; iy + 1 < ny; ++iy) {
      const auto flux = [&](std::size_t jx, std::size_t jy, int axis) {
        return rho(at(jx, jy)) * field.gradient(g.node(at(jx, jy)))[axis];
      };
      const double c = rho(at(ix, iy));
      const double r =
          (flux(ix + 1, iy, 0) - flux(ix - 1, iy, 0)) / (2 * hx) +
          (flux(ix, iy + 1, 1) - flux(ix, iy - 1, 1)) / (2 * hy) +
          0.5 * s * ((rho(at(ix + 1, iy)) - 2 * c + rho(at(ix - 1, iy))) / (hx * hx) +
                     (rho(at(ix, iy + 1)) - 2 * c + rho(at(ix, iy - 1))) / (hy * hy));
      worst = std::max(worst, std::fabs(r));
    }
  }
  return worst;
}

}  // namespace sgdlab::gibbs
