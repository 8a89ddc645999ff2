#include "dysonprop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "dysonprop/random.hpp"

namespace dysonprop {

Report make_report(std::string name, double residual, double tolerance, nlohmann::json context) {
  Report r;
  r.check_name = std::move(name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.passed = residual <= tolerance;
  r.context = std::move(context);
  return r;
}

Matrix matrix_exp(const Matrix& T) {
  if (!T.allFinite()) throw InputError("matrix_exp: non-finite entries");
  if (T.rows() != T.cols()) throw InputError("matrix_exp: matrix is not square");
  // e^{||T||_1} bounds the result; beyond ~700 it cannot be represented.
  const double n1 = T.cwiseAbs().colwise().sum().maxCoeff();
  if (n1 > 700.0) throw std::overflow_error("matrix_exp: norm " + std::to_string(n1) + " overflows");
  Matrix E = T.exp();
  if (!E.allFinite()) throw std::overflow_error("matrix_exp: result is not finite");
  return E;
}

LinOp matrix_exp(const LinOp& T) { return LinOp(T.space_ptr(), matrix_exp(T.matrix())); }

LinOp oracle_propagator(const LinOp& H0, const LinOp& H1, double t, double t_prime) {
  require_same_space(H0, H1, "oracle_propagator");
  const cplx i{0.0, 1.0};
  const Matrix& h0 = H0.matrix();
  const Matrix H = h0 + H1.matrix();
  Matrix U = matrix_exp(Matrix(i * t * h0)) * matrix_exp(Matrix(-i * (t - t_prime) * H)) *
             matrix_exp(Matrix(-i * t_prime * h0));
  return LinOp(H0.space_ptr(), std::move(U));
}

Vector ode_oracle(const LinOp& H0, const LinOp& H1, const Vector& xi, double t, double t_prime, double tol) {
  namespace odeint = boost::numeric::odeint;
  require_same_space(H0, H1, "ode_oracle");
  require_dim(H0.space(), xi.size(), "ode_oracle");
  if (!(tol > 0)) throw InputError("ode_oracle: tol must be > 0");
  if (t == t_prime) return xi;
  // Own diagonalisation of H0 (whole matrix, no grading structure).
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H0.matrix() + H0.matrix().adjoint()));
  const Matrix& Q = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Matrix Hq = Q.adjoint() * H1.matrix() * Q;
  const auto n = xi.size();

  using state = std::vector<cplx>;
  auto rhs = [&](const state& y, state& dy, double s) {
    Eigen::Map<const Vector> yv(y.data(), n);
    Eigen::Map<Vector> dv(dy.data(), n);
    Vector tmp(n);
    for (Eigen::Index j = 0; j < n; ++j) tmp(j) = std::polar(1.0, -s * lam(j)) * yv(j);
    Vector out = Hq * tmp;
    for (Eigen::Index j = 0; j < n; ++j) dv(j) = cplx(0.0, -1.0) * std::polar(1.0, s * lam(j)) * out(j);
  };

  const Vector y0 = Q.adjoint() * xi;
  state y(y0.data(), y0.data() + n);
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<state>());
  const double dir = t > t_prime ? 1.0 : -1.0;
  double s = t_prime;
  double dt = dir * std::min(0.01, std::abs(t - t_prime));
  long steps = 0;
  while (dir * (t - s) > 0) {
    if (dir * (s + dt - t) > 0) dt = t - s;
    const double tried = dt;
    const auto res = stepper.try_step(rhs, y, s, dt);
    if (res == odeint::fail) {
      if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(s)))
        throw StiffnessError(s, tried, "rejected step below 1e-14 relative; tol=" + std::to_string(tol));
      continue;
    }
    if (++steps > 50'000'000) throw StiffnessError(s, dt, "step budget exhausted");
  }
  Eigen::Map<const Vector> yv(y.data(), n);
  return Q * yv;
}

std::vector<Report> identity_suite(const LinOp& H0, const LinOp& H1, const SuiteParams& params) {
  return identity_suite(DysonEngine(H0, H1), params);
}

std::vector<Report> identity_suite(const DysonEngine& e, const SuiteParams& p) {
  Rng rng(p.seed);
  std::uniform_real_distribution<double> ut(-p.time_range, p.time_range);
  const auto n = static_cast<Eigen::Index>(e.H0().dim());
  const double tol = p.series_tol;
  const bool hermitian = (e.H1().matrix() - e.H1().matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0;
  double cocycle = 0.0, covariance = 0.0, inverse = 0.0, unitarity = 0.0, duality = 0.0;
  auto worst_col = [](const Matrix& D) { return D.colwise().norm().maxCoeff(); };
  nlohmann::json tuples = nlohmann::json::array();
  for (int k = 0; k < p.tuples; ++k) {
    const double t = ut(rng), tp = ut(rng), tpp = ut(rng), s = ut(rng);
    tuples.push_back({t, tp, tpp, s});
    Matrix X(n, p.probe_vectors);
    for (int c = 0; c < p.probe_vectors; ++c) X.col(c) = random_unit_vector(rng, n);

    const Matrix a = e.apply_block(tp, tpp, X, tol);
    cocycle = std::max(cocycle, worst_col(e.apply_block(t, tp, a, tol) - e.apply_block(t, tpp, X, tol)));

    // e^{isH0} U(t,t') e^{-isH0} = U(t+s, t'+s)
    const Matrix lhs = e.free_evolution(-s, e.apply_block(t, tp, e.free_evolution(s, X), tol));
    covariance = std::max(covariance, worst_col(lhs - e.apply_block(t + s, tp + s, X, tol)));

    inverse = std::max(inverse, worst_col(e.apply_block(t, tp, e.apply_block(tp, t, X, tol), tol) - X));

    if (hermitian) {
      const Matrix U = e.propagator(t, 0.0, tol);
      unitarity = std::max(unitarity, spectral_norm(U.adjoint() * U - Matrix::Identity(n, n)));
    }

    Matrix etas(n, p.pairs), xis(n, p.pairs);
    for (int c = 0; c < p.pairs; ++c) {
      etas.col(c) = random_unit_vector(rng, n);
      xis.col(c) = random_unit_vector(rng, n);
    }
    const Matrix Ue = e.apply_block(t, tp, etas, tol);
    Matrix Ux(n, p.pairs);
    for (int c = 0; c < p.pairs; ++c) Ux.col(c) = e.apply_adjoint(t, tp, xis.col(c), tol);
    for (int c = 0; c < p.pairs; ++c)
      duality = std::max(duality, std::abs(Ue.col(c).dot(xis.col(c)) - etas.col(c).dot(Ux.col(c))));
  }
  const nlohmann::json ctx = {{"dim", n},
                              {"seed", p.seed},
                              {"series_tol", tol},
                              {"tuples", tuples},
                              {"grade_shift", e.cert().b},
                              {"relative_bound", e.cert().C}};
  std::vector<Report> out;
  out.push_back(make_report("cocycle", cocycle, p.tol, ctx));
  out.push_back(make_report("translation_covariance", covariance, p.tol, ctx));
  out.push_back(make_report("inverse", inverse, p.tol, ctx));
  if (hermitian) out.push_back(make_report("unitarity", unitarity, p.unitarity_tol, ctx));
  nlohmann::json dctx = ctx;
  dctx["pairs"] = p.pairs;
  out.push_back(make_report("adjoint_duality", duality, p.duality_tol, dctx));
  return out;
}

double weighted_tail_bound(int n, double interval, const GradeCert& cert, double L_xi, double norm_xi,
                           double alpha) {
  if (interval == 0 || cert.C == 0 || norm_xi == 0) return 0.0;
  // log of (|I|^k / k!) C^k prod_{j<k} (L + j b + 1)^{1/2} ||xi||, built for k = 1..n.
  double lg = std::log(norm_xi);
  for (int k = 1; k <= n; ++k) lg += std::log(interval * cert.C / k) + 0.5 * std::log(L_xi + (k - 1) * cert.b + 1.0);
  double tail = 0.0;
  for (int k = n + 1; k < n + 100000; ++k) {
    lg += std::log(interval * cert.C / k) + 0.5 * std::log(L_xi + (k - 1) * cert.b + 1.0);
    const double inc = std::exp(lg + 0.5 * alpha * std::log(L_xi + k * cert.b + 1.0));
    tail += inc;
    if (!std::isfinite(tail)) return std::numeric_limits<double>::infinity();
    const double ratio = interval * cert.C * std::sqrt(L_xi + k * cert.b + 1.0) / (k + 1.0) *
                         std::pow((L_xi + (k + 1) * cert.b + 1.0) / (L_xi + k * cert.b + 1.0), 0.5 * alpha);
    if (inc < 1e-3 * tail && ratio < 0.5) break;
  }
  return tail;
}

ConvergenceTable appendix_convergence(const LinOp& H0, const LinOp& H1, const Vector& xi, const TimeGrid& grid,
                                      const std::vector<double>& alphas, int n_max) {
  if (n_max < 2) throw InputError("appendix_convergence: N_max must be >= 2");
  for (double a : alphas)
    if (!(a >= 0)) throw InputError("appendix_convergence: alpha must be >= 0");
  EngineOptions opts;
  opts.keep_terms = true;
  opts.estimate_quadrature = false;
  opts.min_order = n_max;
  opts.max_order = std::max(n_max, opts.max_order);
  const DysonEngine e(H0, H1, opts);
  const SeriesResult r = e.evolve(xi, grid, std::numeric_limits<double>::max());
  const auto& space = H0.space();
  const std::size_t nodes = grid.node_count();
  const double L = support_grade(space, xi);
  const double interval = std::abs(grid.t_end - grid.t_start);

  ConvergenceTable tab;
  tab.alphas = alphas;
  tab.n_max = n_max;
  tab.norms.assign(n_max + 1, std::vector<double>(alphas.size(), 0.0));
  tab.bounds.assign(n_max + 1, std::vector<double>(alphas.size(), 0.0));
  // phi - phi_n = sum_{k=n+1}^{n_max} U_k, accumulated from the top order down.
  std::vector<Vector> rest(nodes, Vector::Zero(xi.size()));
  for (int m = n_max; m >= 0; --m) {
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      double sup = 0.0;
      for (std::size_t i = 0; i < nodes; ++i) sup = std::max(sup, weighted_norm(space, rest[i], alphas[a]));
      tab.norms[m][a] = sup;
      tab.bounds[m][a] = weighted_tail_bound(m, interval, r.cert, L, xi.norm(), alphas[a]);
    }
    for (std::size_t i = 0; i < nodes; ++i) rest[i] += r.terms[m].values[i];
  }
  tab.dominated = true;
  for (int m = 0; m <= n_max; ++m)
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const double v = tab.norms[m][a], bnd = tab.bounds[m][a];
      if (v > bnd * (1.0 + 1e-3)) tab.dominated = false;
      if (v > 0) tab.worst_ratio = std::max(tab.worst_ratio, bnd > 0 ? v / bnd : std::numeric_limits<double>::infinity());
    }
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    int n0 = n_max - 1;
    while (n0 > 0 && tab.norms[n0 - 1][a] > tab.norms[n0][a]) --n0;
    // A column that is identically zero never decreases.
    tab.onset.push_back(tab.norms[n_max - 1][a] > 0 && n0 < n_max - 1 ? n0 : -1);
  }
  return tab;
}

}  // namespace dysonprop
