#include "sgdlab/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <json.hpp>

namespace sgdlab::morse {

namespace {

constexpr double kEigTol = 1e-8;    // Morse nondegeneracy threshold
constexpr double kValueTie = 1e-9;  // ties route to the degenerate path

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<double> sample_values(const ScalarField& field, const GridSpec& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = field.value(grid.node(i));
  return f;
}

std::vector<std::size_t> neighbors(const GridSpec& g, std::size_t idx) {
  std::vector<std::size_t> out;
  if (g.dimension == 1) {
    if (idx > 0) out.push_back(idx - 1);
    if (idx + 1 < g.n[0]) out.push_back(idx + 1);
    return out;
  }
  const std::size_t ny = g.n[1], ix = idx / ny, iy = idx % ny;
  if (ix > 0) out.push_back(idx - ny);
  if (ix + 1 < g.n[0]) out.push_back(idx + ny);
  if (iy > 0) out.push_back(idx - 1);
  if (iy + 1 < ny) out.push_back(idx + 1);
  return out;
}

// connected components of {f < level}; label -1 outside the sublevel set
std::vector<int> sublevel_components(const GridSpec& grid, const std::vector<double>& f,
                                     double level) {
  std::vector<int> label(grid.size(), -1);
  int next = 0;
  for (std::size_t start = 0; start < grid.size(); ++start) {
    if (f[start] >= level || label[start] >= 0) continue;
    std::queue<std::size_t> q;
    q.push(start);
    label[start] = next;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      for (std::size_t nb : neighbors(grid, i))
        if (f[nb] < level && label[nb] < 0) {
          label[nb] = next;
          q.push(nb);
        }
    }
    ++next;
  }
  return label;
}

std::size_t nearest_node(const GridSpec& g, const Point& p) {
  const auto clampi = [](double t, std::size_t n) {
    const auto i = static_cast<std::ptrdiff_t>(std::llround(t));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        i, 0, static_cast<std::ptrdiff_t>(n) - 1));
  };
  const std::size_t ix = clampi((p[0] - g.lo[0]) / g.spacing(0), g.n[0]);
  if (g.dimension == 1) return ix;
  return ix * g.n[1] + clampi((p[1] - g.lo[1]) / g.spacing(1), g.n[1]);
}

Point negative_direction(const CriticalPoint& saddle, const ScalarField& field) {
  if (field.dimension == 1) return point1(1.0);
  const SymMat h = field.hessian(saddle.location);
  const double eta = saddle.hessian_eigs[1];  // the negative eigenvalue
  // eigenvector of the 2x2 symmetric matrix for eigenvalue eta
  Point v;
  if (std::fabs(h.a12) > 1e-14) {
    v = point2(h.a12, eta - h.a11);
  } else {
    v = std::fabs(h.a11 - eta) < std::fabs(h.a22 - eta) ? point2(1, 0) : point2(0, 1);
  }
  const double n = norm(v, 2);
  return point2(v[0] / n, v[1] / n);
}

// label of the sublevel component reached by descending from one side of the
// saddle; -1 if unreachable at this resolution
int side_component(const ScalarField& field, const CriticalPoint& saddle,
                   const GridSpec& grid, const std::vector<double>& f, double level,
                   const std::vector<int>& label, double sign) {
  const Point v = negative_direction(saddle, field);
  const double hmin = grid.dimension == 1
                          ? grid.spacing(0)
                          : std::min(grid.spacing(0), grid.spacing(1));
  for (int k = 1; k <= 400; ++k) {
    const double t = sign * k * 0.5 * hmin;
    Point p{saddle.location[0] + t * v[0], saddle.location[1] + t * v[1]};
    if (field.value(p) >= level) continue;
    const std::size_t node = nearest_node(grid, p);
    if (label[node] >= 0) return label[node];
    for (std::size_t nb : neighbors(grid, node))
      if (label[nb] >= 0) return label[nb];
    (void)f;
  }
  return -1;
}

CriticalPoint classify(const ScalarField& field, const Point& x) {
  CriticalPoint cp;
  cp.location = x;
  cp.value = field.value(x);
  cp.hessian_eigs = field.hessian(x).eigs(field.dimension);
  cp.index = 0;
  for (int i = 0; i < field.dimension; ++i)
    if (cp.hessian_eigs[i] < 0) ++cp.index;
  for (int i = 0; i < field.dimension; ++i)
    if (std::fabs(cp.hessian_eigs[i]) < kEigTol)
      throw NondegeneracyError("near-singular Hessian at a critical point", x);
  cp.converged = true;
  return cp;
}

double value_scale(const std::vector<CriticalPoint>& criticals) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : criticals) {
    lo = std::min(lo, c.value);
    hi = std::max(hi, c.value);
  }
  return std::max(1.0, hi - lo);
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const ScalarField& field,
                                                const GridSpec& grid,
                                                double newton_tol,
                                                double dedupe_radius) {
  grid.validate();
  const int dim = field.dimension;
  std::vector<double> gn(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gn[i] = field.grad_norm_sq(grid.node(i));

  std::vector<Point> seeds;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bool local_min = true;
    for (std::size_t nb : neighbors(grid, i)) local_min &= gn[i] <= gn[nb];
    if (local_min) seeds.push_back(grid.node(i));
  }

  const double span =
      std::max(grid.hi[0] - grid.lo[0],
               dim == 2 ? grid.hi[1] - grid.lo[1] : 0.0);
  const auto refine = [&](Point x) -> std::optional<Point> {
    for (int it = 0; it < 80; ++it) {
      const Point g = field.gradient(x);
      if (norm(g, dim) <= newton_tol) return x;
      const SymMat h = field.hessian(x);
      Point step{0, 0};
      if (dim == 1) {
        if (std::fabs(h.a11) < 1e-14) return std::nullopt;
        step[0] = g[0] / h.a11;
      } else {
        const double det = h.det(2);
        if (std::fabs(det) < 1e-14) return std::nullopt;
        step[0] = (h.a22 * g[0] - h.a12 * g[1]) / det;
        step[1] = (-h.a12 * g[0] + h.a11 * g[1]) / det;
      }
      const double sn = norm(step, dim);
      if (sn > 0.5) {  // clip long steps to stay near the seed's basin
        step[0] *= 0.5 / sn;
        step[1] *= 0.5 / sn;
      }
      x = {x[0] - step[0], x[1] - step[1]};
      if (std::fabs(x[0] - 0.5 * (grid.lo[0] + grid.hi[0])) > span ||
          (dim == 2 && std::fabs(x[1] - 0.5 * (grid.lo[1] + grid.hi[1])) > span))
        return std::nullopt;  // left the search region: skip this seed
    }
    return std::nullopt;
  };

  std::vector<CriticalPoint> found;
  const auto add = [&](const Point& seed) {
    const auto x = refine(seed);
    if (!x) return;
    for (const auto& c : found) {
      Point d{c.location[0] - (*x)[0], c.location[1] - (*x)[1]};
      if (norm(d, dim) < dedupe_radius) return;
    }
    found.push_back(classify(field, *x));
  };
  for (const auto& s : seeds) add(s);

  // saddles sit between minima: seed midpoints of every minimum pair
  std::vector<Point> minima;
  for (const auto& c : found)
    if (c.index == 0) minima.push_back(c.location);
  for (std::size_t a = 0; a < minima.size(); ++a)
    for (std::size_t b = a + 1; b < minima.size(); ++b)
      add({0.5 * (minima[a][0] + minima[b][0]), 0.5 * (minima[a][1] + minima[b][1])});

  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.location[0] != b.location[0]) return a.location[0] < b.location[0];
    return a.location[1] < b.location[1];
  });
  return found;
}

namespace {

// The sublevel gap at a saddle has half-width ~ sqrt(2 offset / |eta|); the
// offset must keep that gap several cells wide or the two basins stay
// grid-connected.
double effective_offset(const CriticalPoint& saddle, const GridSpec& grid,
                        double level_offset) {
  const double hmin = grid.dimension == 1
                          ? grid.spacing(0)
                          : std::min(grid.spacing(0), grid.spacing(1));
  const double eta = std::fabs(saddle.hessian_eigs[grid.dimension - 1]);
  return std::max(level_offset, 12.5 * eta * hmin * hmin);
}

}  // namespace

bool separating_test(const ScalarField& field, const CriticalPoint& saddle,
                     const GridSpec& grid, double level_offset) {
  if (saddle.index != 1) throw std::invalid_argument("saddle must have index 1");
  const auto f = sample_values(field, grid);
  const double level = saddle.value - effective_offset(saddle, grid, level_offset);
  const auto label = sublevel_components(grid, f, level);
  const int a = side_component(field, saddle, grid, f, level, label, +1.0);
  const int b = side_component(field, saddle, grid, f, level, label, -1.0);
  if (a < 0 || b < 0)
    throw ResolutionError("descent sides unresolved; refine the grid");
  return a != b;
}

MorseReport labeling(const ScalarField& field,
                     const std::vector<CriticalPoint>& criticals,
                     const GridSpec& grid) {
  MorseReport rep;
  for (const auto& c : criticals) {
    if (!c.converged) throw std::invalid_argument("unconverged critical point");
    if (c.index == 0) rep.minima.push_back(c);
    if (c.index == 1) rep.saddles_index1.push_back(c);
  }
  if (rep.minima.empty()) throw std::invalid_argument("no local minima found");

  const double offset = 1e-6 * value_scale(criticals);
  for (const auto& sd : rep.saddles_index1)
    if (separating_test(field, sd, grid, offset)) rep.separating_saddles.push_back(sd);

  // tie detection routes to the degenerate (interval-barrier) path
  for (std::size_t a = 0; a < rep.minima.size(); ++a)
    for (std::size_t b = a + 1; b < rep.minima.size(); ++b)
      if (std::fabs(rep.minima[a].value - rep.minima[b].value) < kValueTie) {
        rep.generic = false;
        rep.degenerate_notes.push_back("local minima share the value " +
                                       std::to_string(rep.minima[a].value));
      }
  for (std::size_t a = 0; a < rep.separating_saddles.size(); ++a)
    for (std::size_t b = a + 1; b < rep.separating_saddles.size(); ++b)
      if (std::fabs(rep.separating_saddles[a].value -
                    rep.separating_saddles[b].value) < kValueTie) {
        rep.generic = false;
        rep.degenerate_notes.push_back("separating saddles share the value " +
                                       std::to_string(rep.separating_saddles[a].value));
      }

  const auto f = sample_values(field, grid);
  const int nmin = static_cast<int>(rep.minima.size());

  if (nmin == 1 || rep.separating_saddles.empty()) {
    SaddlePairing fictive;
    fictive.minimum = rep.minima.front();
    fictive.barrier = std::numeric_limits<double>::infinity();
    rep.pairings.push_back(fictive);
    rep.H_f = std::numeric_limits<double>::infinity();
    if (nmin == 1) rep.degenerate_notes.push_back("single minimum: convex-like landscape");
    return rep;
  }

  // merge basins through saddles in ascending value order; each merge retires
  // the higher of the two component minima and pairs it with the saddle
  auto saddles = rep.separating_saddles;
  std::sort(saddles.begin(), saddles.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
  UnionFind uf(nmin);
  std::vector<SaddlePairing> finite;
  for (const auto& sd : saddles) {
    const double level = sd.value - effective_offset(sd, grid, offset);
    const auto label = sublevel_components(grid, f, level);
    const int ca = side_component(field, sd, grid, f, level, label, +1.0);
    const int cb = side_component(field, sd, grid, f, level, label, -1.0);
    if (ca < 0 || cb < 0)
      throw ResolutionError("descent sides unresolved; refine the grid");
    if (ca == cb) continue;  // no longer separating after earlier merges

    // lowest minimum inside each side component
    const auto best_in = [&](int comp) -> int {
      int best = -1;
      for (int m = 0; m < nmin; ++m) {
        if (label[nearest_node(grid, rep.minima[m].location)] != comp) continue;
        if (best < 0 || rep.minima[m].value < rep.minima[best].value) best = m;
      }
      return best;
    };
    const int ma = best_in(ca), mb = best_in(cb);
    if (ma < 0 || mb < 0)
      throw ResolutionError("a sublevel component holds no detected minimum");
    if (uf.find(ma) == uf.find(mb)) continue;  // tied saddle already merged these basins
    const bool a_loses = rep.minima[ma].value > rep.minima[mb].value ||
                         (rep.minima[ma].value == rep.minima[mb].value &&
                          rep.minima[ma].location[0] > rep.minima[mb].location[0]);
    const int loser = a_loses ? ma : mb;
    SaddlePairing p;
    p.saddle = sd;
    p.minimum = rep.minima[loser];
    p.barrier = sd.value - rep.minima[loser].value;
    finite.push_back(p);
    uf.unite(ma, mb);
  }

  std::sort(finite.begin(), finite.end(), [](const SaddlePairing& a, const SaddlePairing& b) {
    return a.barrier > b.barrier;
  });

  int global = 0;
  for (int m = 1; m < nmin; ++m)
    if (rep.minima[m].value < rep.minima[global].value) global = m;
  SaddlePairing fictive;
  fictive.minimum = rep.minima[global];
  fictive.barrier = std::numeric_limits<double>::infinity();
  rep.pairings.push_back(fictive);

  const double top_saddle = finite.empty() ? 0.0 : finite.front().saddle->value;
  for (auto& p : finite) {
    p.gamma = prefactor(field, p);
    if (!rep.generic)
      p.barrier_interval = std::make_pair(p.barrier,
                                          top_saddle - rep.minima[global].value);
    rep.pairings.push_back(p);
  }
  rep.H_f = finite.empty() ? std::numeric_limits<double>::infinity()
                           : finite.front().barrier;
  return rep;
}

double barrier(const MorseReport& report) {
  if (report.minima.size() < 2)
    throw NoBarrierError("single minimum: no Morse saddle barrier");
  return report.H_f;
}

double prefactor(const ScalarField& field, const SaddlePairing& pairing) {
  if (!pairing.saddle) throw std::invalid_argument("fictive pairing has no prefactor");
  const CriticalPoint& sd = *pairing.saddle;
  const CriticalPoint& mn = pairing.minimum;
  if (sd.index != 1 || mn.index != 0)
    throw std::invalid_argument("prefactor needs an index-1 saddle and a minimum");
  const int d = field.dimension;
  const double det_min = d == 1 ? mn.hessian_eigs[0]
                                : mn.hessian_eigs[0] * mn.hessian_eigs[1];
  const double det_sad = d == 1 ? sd.hessian_eigs[0]
                                : sd.hessian_eigs[0] * sd.hessian_eigs[1];
  if (det_min <= 0 || (d == 1 ? det_sad >= 0 : det_sad >= 0))
    throw std::domain_error("Hessian determinant signs inconsistent with indices");
  const double eta = sd.hessian_eigs[d - 1];  // the unique negative eigenvalue
  return std::fabs(eta) / std::numbers::pi * std::sqrt(det_min / -det_sad);
}

PredictionInterval eyring_kramers_predict(const ScalarField& field,
                                          const MorseReport& report, double s,
                                          int ell) {
  const int nfinite = static_cast<int>(report.pairings.size()) - 1;
  if (ell < 1 || ell > nfinite)
    throw std::invalid_argument("ell must lie in [1, #minima - 1]");
  const SaddlePairing& p = report.pairings[ell];
  const double gamma = p.gamma ? *p.gamma : prefactor(field, p);
  PredictionInterval out;
  if (report.generic || !p.barrier_interval) {
    out.lo = out.hi = s * gamma * std::exp(-2.0 * p.barrier / s);
    return out;
  }
  out.lo = s * gamma * std::exp(-2.0 * p.barrier_interval->second / s);
  out.hi = s * gamma * std::exp(-2.0 * p.barrier_interval->first / s);
  return out;
}

std::string to_json(const MorseReport& report) {
  nlohmann::json j;
  const auto cp_json = [](const CriticalPoint& c) {
    nlohmann::json o;
    o["location"] = {c.location[0], c.location[1]};
    o["value"] = c.value;
    o["index"] = c.index;
    o["hessian_eigs"] = {c.hessian_eigs[0], c.hessian_eigs[1]};
    return o;
  };
  for (const auto& m : report.minima) j["minima"].push_back(cp_json(m));
  for (const auto& s : report.saddles_index1) j["saddles_index1"].push_back(cp_json(s));
  for (const auto& s : report.separating_saddles)
    j["separating_saddles"].push_back(cp_json(s));
  for (const auto& p : report.pairings) {
    nlohmann::json o;
    o["minimum"] = cp_json(p.minimum);
    if (p.saddle) {
      o["saddle"] = cp_json(*p.saddle);
      o["barrier"] = p.barrier;
    } else {
      o["saddle"] = "infinity";
    }
    if (p.gamma) o["gamma"] = *p.gamma;
    if (p.barrier_interval)
      o["barrier_interval"] = {p.barrier_interval->first, p.barrier_interval->second};
    j["pairings"].push_back(o);
  }
  j["H_f"] = std::isfinite(report.H_f) ? nlohmann::json(report.H_f)
                                       : nlohmann::json("infinity");
  j["generic"] = report.generic;
  j["degenerate_notes"] = report.degenerate_notes;
  return j.dump(2);
}

}  // namespace sgdlab::morse
