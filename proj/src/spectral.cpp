#include "sgdlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "sgdlab/objective.hpp"

namespace sgdlab::spectral {

namespace {

constexpr double kBoundaryLogTol = -23.025850929940457;  // log(1e-10)

bool ground_state_boundary_ok(const ScalarField& field, double s, const GridSpec& grid) {
  double fmin = std::numeric_limits<double>::infinity();
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f[i] = field.value(grid.node(i));
    fmin = std::min(fmin, f[i]);
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.on_boundary(i) && -(f[i] - fmin) / s >= kBoundaryLogTol) return false;
  return true;
}

Spectrum from_pairs(const WittenOperator& op, int k,
                    const Eigen::VectorXd& vals, const Eigen::MatrixXd& vecs,
                    bool want_vectors) {
  Spectrum sp;
  sp.s = op.s;
  for (int i = 0; i < k; ++i) {
    sp.eigenvalues.push_back(vals(i));
    sp.zeta.push_back(vals(i) / op.s);
  }
  if (sp.eigenvalues.size() >= 2) {
    if (std::fabs(sp.eigenvalues[1]) < 1e-250)
      throw PrecisionError("delta_{s,1} below the floating-point floor; raise s");
    sp.lambda_s = sp.eigenvalues[1] / (2.0 * op.s);
  }
  if (want_vectors) {
    for (int i = 0; i < k; ++i) {
      std::vector<double> full(op.grid.size(), 0.0);
      Eigen::VectorXd v = vecs.col(i);
      // deterministic sign: largest-magnitude component positive
      int arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      if (v(arg) < 0) v = -v;
      for (std::size_t j = 0; j < op.interior_to_node.size(); ++j)
        full[op.interior_to_node[j]] = v(static_cast<Eigen::Index>(j));
      sp.eigenvectors.push_back(std::move(full));
    }
  }
  return sp;
}

}  // namespace

WittenOperator assemble_witten(const ScalarField& field, double s, const GridSpec& grid) {
  if (s <= 0) throw std::invalid_argument("s must be positive");
  grid.validate();
  if (grid.dimension != field.dimension)
    throw std::invalid_argument("grid and field dimensions disagree");
  if (!ground_state_boundary_ok(field, s, grid))
    throw TruncationError("ground-state boundary criterion violated; enlarge the box");

  WittenOperator op;
  op.grid = grid;
  op.s = s;

  std::vector<std::ptrdiff_t> node_to_interior(grid.size(), -1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.on_boundary(i)) continue;
    node_to_interior[i] = static_cast<std::ptrdiff_t>(op.interior_to_node.size());
    op.interior_to_node.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(op.interior_to_node.size());

  const double hx = grid.spacing(0);
  const double cx = s * s / (hx * hx);
  const double hy = grid.dimension == 2 ? grid.spacing(1) : 1.0;
  const double cy = grid.dimension == 2 ? s * s / (hy * hy) : 0.0;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  op.potential_values.reserve(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t node = op.interior_to_node[r];
    const Point x = op.grid.node(node);
    const double v = field.grad_norm_sq(x) - s * field.laplacian(x);
    op.potential_values.push_back(v);
    trip.emplace_back(r, r, 2.0 * cx + (grid.dimension == 2 ? 2.0 * cy : 0.0) + v);

    const auto couple = [&](std::size_t nb, double c) {
      const auto cidx = node_to_interior[nb];
      if (cidx >= 0) trip.emplace_back(r, static_cast<Eigen::Index>(cidx), -c);
    };
    if (grid.dimension == 1) {
      couple(node - 1, cx);
      couple(node + 1, cx);
    } else {
      couple(node - grid.n[1], cx);
      couple(node + grid.n[1], cx);
      couple(node - 1, cy);
      couple(node + 1, cy);
    }
  }
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  return op;
}

GridSpec certified_box(const ScalarField& field, double s, const GridPolicy& policy) {
  for (double R = policy.start_radius; R <= 4096.0; R *= 2.0) {
    GridSpec g = field.dimension == 1
                     ? GridSpec::line(-R, R, policy.nodes)
                     : GridSpec::box(-R, R, -R, R, policy.nodes, policy.nodes);
    if (ground_state_boundary_ok(field, s, g)) return g;
  }
  throw TruncationError("no certified box up to radius 4096");
}

Spectrum smallest_eigs_dense(const WittenOperator& op, int k, bool want_vectors) {
  const Eigen::Index n = op.matrix.rows();
  if (k < 2 || k >= n) throw std::invalid_argument("need 2 <= k < operator size");
  if (n > 2000) throw SolverError("dense path limited to 2000 unknowns");
  Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolve failed");
  return from_pairs(op, k, es.eigenvalues().head(k),
                    es.eigenvectors().leftCols(k), want_vectors);
}

Spectrum smallest_eigs(const WittenOperator& op, int k, bool want_vectors) {
  const Eigen::Index n = op.matrix.rows();
  if (k < 2 || k >= n) throw std::invalid_argument("need 2 <= k < operator size");

  // shift-invert: smallest eigenvalues of A become the extremal ones of
  // (A - sigma I)^{-1}; sigma slightly negative keeps the factorization PD
  double scale = 0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::fabs(op.matrix.coeff(i, i)));
  const double sigma = -1e-6 * std::max(scale, 1.0);

  Eigen::SparseMatrix<double> shifted = op.matrix;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("shift-invert factorization failed");

  const int m = static_cast<int>(std::min<Eigen::Index>(n, std::max(60, 10 * k)));
  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd alpha(m), beta(m);

  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::sin(0.7 * static_cast<double>(i) + 0.3) + 0.5;
  v.normalize();

  int built = 0;
  Eigen::VectorXd w;
  for (int j = 0; j < m; ++j) {
    V.col(j) = v;
    ++built;
    w = ldlt.solve(v);
    alpha(j) = v.dot(w);
    // full reorthogonalization, twice for safety
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    beta(j) = w.norm();
    if (beta(j) < 1e-13) break;  // invariant subspace found
    v = w / beta(j);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  if (es.info() != Eigen::Success) throw SolverError("tridiagonal eigensolve failed");

  // Converged Ritz values theta of the inverse map to eigenvalues
  // delta = sigma + 1/theta of A; the discrete ground state may sit slightly
  // below sigma, so both ends of the theta spectrum matter.
  const double beta_last = beta(built - 1);
  std::vector<std::pair<double, int>> ritz;  // (delta, tridiagonal column)
  for (int c = 0; c < built; ++c) {
    const double theta = es.eigenvalues()(c);
    if (theta == 0) continue;
    const double err = std::fabs(beta_last * es.eigenvectors()(built - 1, c));
    if (err > 1e-6 * std::fabs(theta)) continue;  // unconverged bulk
    ritz.emplace_back(sigma + 1.0 / theta, c);
  }
  std::sort(ritz.begin(), ritz.end());
  if (static_cast<int>(ritz.size()) < k)
    throw SolverError("Lanczos converged to fewer Ritz pairs than requested");

  Eigen::VectorXd vals(k);
  Eigen::MatrixXd vecs(n, k);
  for (int i = 0; i < k; ++i) {
    vals(i) = ritz[i].first;
    Eigen::VectorXd x = V.leftCols(built) * es.eigenvectors().col(ritz[i].second);
    x.normalize();
    vecs.col(i) = x;
  }
  // residual certificate
  std::ostringstream bad;
  for (int i = 0; i < k; ++i) {
    const double res = (op.matrix * vecs.col(i) - vals(i) * vecs.col(i)).norm();
    if (res > 1e-7 * std::max(scale, 1.0))
      bad << " |A v - lambda v| = " << res << " at index " << i;
  }
  if (!bad.str().empty())
    throw SolverError("Lanczos did not converge:" + bad.str());

  return from_pairs(op, k, vals, vecs, want_vectors);
}

ExpLawFit exp_law_fit(const ScalarField& field, const std::vector<double>& s_values,
                      const GridPolicy& policy) {
  if (s_values.size() < 4) throw std::invalid_argument("need at least 4 values of s");
  ExpLawFit fit;
  fit.s_values = s_values;
  std::vector<double> x, y;
  for (double s : s_values) {
    const GridSpec g = certified_box(field, s, policy);
    const Spectrum sp = smallest_eigs(assemble_witten(field, s, g), 3, false);
    fit.lambda_values.push_back(sp.lambda_s);
    x.push_back(1.0 / s);
    y.push_back(std::log(sp.lambda_s));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

double ground_state_check(const ScalarField& field, const WittenOperator& op,
                          const Spectrum& spectrum) {
  if (spectrum.eigenvectors.empty())
    throw std::invalid_argument("spectrum carries no eigenvectors");
  // the continuum ground state is e^{-f/s} = sqrt(mu_s)
  const auto n = static_cast<Eigen::Index>(op.interior_to_node.size());
  Eigen::VectorXd phi(n), target(n);
  double shift = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    shift = std::min(shift, field.value(op.grid.node(op.interior_to_node[i])));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t node = op.interior_to_node[i];
    phi(i) = spectrum.eigenvectors[0][node];
    target(i) = std::exp(-(field.value(op.grid.node(node)) - shift) / op.s);
  }
  phi.normalize();
  target.normalize();
  return 1.0 - std::fabs(phi.dot(target));
}

}  // namespace sgdlab::spectral
