#include "dysonprop/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/SparseCore>

#include "dysonprop/parallel.hpp"

namespace dysonprop {

namespace {

constexpr cplx kMinusI{0.0, -1.0};
// Columns evolved together; bounds the node-sampled storage of a block run.
constexpr Eigen::Index kChunkColumns = 64;

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index k = 0; k < m.cols(); ++k)
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      if (j != k && m(j, k) != cplx(0.0)) return false;
  return true;
}

// Eigenframe of H0. V is block diagonal in the grading when by_grade is set,
// so grade supports are the same in both frames.
struct Frame {
  bool diagonal = true;
  Matrix V;
  Eigen::VectorXd E;

  Matrix to_eigen(const Matrix& X) const { return diagonal ? X : Matrix(V.adjoint() * X); }
  Matrix from_eigen(const Matrix& X) const { return diagonal ? X : Matrix(V * X); }
  Matrix conj_in(const Matrix& T) const { return diagonal ? T : Matrix(V.adjoint() * T * V); }
};

Frame make_frame(const LinOp& H0, bool by_grade) {
  Frame f;
  const Matrix& h = H0.matrix();
  const auto n = h.rows();
  if (is_diagonal(h)) {
    f.diagonal = true;
    f.E = h.diagonal().real();
    return f;
  }
  f.diagonal = false;
  f.V = Matrix::Zero(n, n);
  f.E.resize(n);
  std::map<double, std::vector<Eigen::Index>> blocks;
  if (by_grade) {
    for (Eigen::Index j = 0; j < n; ++j) blocks[H0.space().grade(j)].push_back(j);
  } else {
    auto& all = blocks[0.0];
    for (Eigen::Index j = 0; j < n; ++j) all.push_back(j);
  }
  for (const auto& [g, idx] : blocks) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index c = 0; c < m; ++c) sub(a, c) = h(idx[a], idx[c]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sub + sub.adjoint()));
    for (Eigen::Index a = 0; a < m; ++a) {
      f.E(idx[a]) = es.eigenvalues()(a);
      for (Eigen::Index c = 0; c < m; ++c) f.V(idx[c], idx[a]) = es.eigenvectors()(c, a);
    }
  }
  return f;
}

struct Plan {
  TimeGrid grid;
  std::vector<double> times;
  std::vector<std::size_t> gauss_node;  // grid index of each Gauss sample
  std::vector<Vector> phase;            // e^{i tau E} at each Gauss sample
  Eigen::VectorXd w;
  Eigen::MatrixXd S;
  double half = 0.0;
  // First panel by Taylor expansion in s = tau - t_start, so node values keep their O(s^n) decay.
  bool taylor = false;
  int taylor_terms = 0;
  Eigen::VectorXd Ec;          // E shifted to the centre of its range
  std::vector<double> s0;      // first-panel Gauss nodes and right edge, relative to t_start
  std::vector<Vector> phase0;  // e^{i tau Ec} at those points
};

std::size_t interior_index(const TimeGrid& g, int p, int q) {
  return 1 + static_cast<std::size_t>(p) * (g.nodes_per_panel + 1) + q;
}

Plan make_plan(const TimeGrid& grid, const Eigen::VectorXd& E) {
  grid.validate();
  Plan P;
  P.grid = grid;
  P.times = grid.node_times();
  const GaussRule rule = gauss_legendre(grid.nodes_per_panel);
  P.w = rule.weights;
  P.S = integration_matrix(rule);
  P.half = (grid.t_end - grid.t_start) / (2.0 * grid.panels);
  const int m = grid.nodes_per_panel;
  P.gauss_node.reserve(static_cast<std::size_t>(grid.panels) * m);
  P.phase.reserve(P.gauss_node.capacity());
  for (int p = 0; p < grid.panels; ++p)
    for (int q = 0; q < m; ++q) {
      const std::size_t idx = interior_index(grid, p, q);
      P.gauss_node.push_back(idx);
      const double tau = P.times[idx];
      Vector ph(E.size());
      for (Eigen::Index j = 0; j < E.size(); ++j) ph(j) = std::polar(1.0, tau * E(j));
      P.phase.push_back(std::move(ph));
    }
  if (E.size() > 0) {
    P.Ec = E.array() - 0.5 * (E.maxCoeff() + E.minCoeff());
    const double r = P.Ec.cwiseAbs().maxCoeff() * 2.0 * std::abs(P.half);
    if (r <= 2.0) {
      P.taylor = true;
      // Smallest M with r^M / M! below 1e-18.
      int M = 0;
      double term = 1.0;
      while (M < 8 || term > 1e-18) {
        ++M;
        term *= r / M;
      }
      P.taylor_terms = M;
      for (int q = 0; q <= m; ++q) {
        const double tau = P.times[interior_index(grid, 0, q)];
        P.s0.push_back(tau - grid.t_start);
        Vector ph(E.size());
        for (Eigen::Index j = 0; j < E.size(); ++j) ph(j) = std::polar(1.0, tau * P.Ec(j));
        P.phase0.push_back(std::move(ph));
      }
    }
  }
  return P;
}

// Taylor window of the order-0 term: coefficient k multiplies s^k.
std::vector<Matrix> taylor_seed(const Plan& P, const Matrix& X) {
  std::vector<Matrix> c(P.taylor_terms + 1);
  Vector ph(P.Ec.size());
  for (Eigen::Index j = 0; j < ph.size(); ++j) ph(j) = std::polar(1.0, -P.grid.t_start * P.Ec(j));
  c[0] = ph.asDiagonal() * X;
  const Vector mE = kMinusI * P.Ec.cast<cplx>();
  for (int k = 1; k <= P.taylor_terms; ++k) c[k] = (mE / static_cast<double>(k)).asDiagonal() * c[k - 1];
  return c;
}

// With Y_n(tau) = e^{-i tau Ec} U_n(tau): Y_{n+1}' = -i Ec Y_{n+1} - i H Y_n, Y_{n+1}(t_start) = 0.
// coeffs holds the order-n window (coefficient k multiplies s^{n+k}) and is advanced to order n + 1.
template <class Op>
void taylor_first_panel(const Op& H, const Plan& P, int n, std::vector<Matrix>& coeffs, std::vector<Matrix>& next) {
  const int M = P.taylor_terms;
  std::vector<Matrix> c(M + 1);
  const Vector mE = kMinusI * P.Ec.cast<cplx>();
  for (int k = 0; k <= M; ++k) {
    Matrix hy = H * coeffs[k];
    c[k] = kMinusI * hy;
    if (k > 0) c[k] += mE.asDiagonal() * c[k - 1];
    c[k] /= static_cast<double>(n + 1 + k);
  }
  coeffs = std::move(c);
  const int m = P.grid.nodes_per_panel;
  for (int q = 0; q <= m; ++q) {
    const double s = P.s0[q];
    Matrix acc = coeffs[M];
    for (int k = M - 1; k >= 0; --k) acc = coeffs[k] + s * acc;
    next[interior_index(P.grid, 0, q)] = std::pow(s, n + 1) * (P.phase0[q].asDiagonal() * acc);
  }
}

// next(tau) = -i int_{t0}^{tau} H(s) prev(s) ds with H(s) = e^{isE} H e^{-isE}.
// When coeffs is given and the plan allows it, the first panel comes from the Taylor window of order n.
template <class Op>
void integrate_step(const Op& H, const Plan& P, const std::vector<Matrix>& prev, std::vector<Matrix>& next,
                    std::vector<Matrix>& F, std::vector<Matrix>* coeffs = nullptr, int n = 0) {
  const int m = P.grid.nodes_per_panel;
  const bool taylor = coeffs != nullptr && P.taylor;
  const auto G = static_cast<long>(P.gauss_node.size());
  const auto rows = prev[0].rows(), cols = prev[0].cols();
  if (F.size() != P.gauss_node.size()) F.assign(P.gauss_node.size(), Matrix(rows, cols));
  const int nt = thread_count();
#ifdef DYSONPROP_HAVE_OPENMP
#pragma omp parallel for num_threads(nt) schedule(static) if (nt > 1)
#endif
  for (long g = taylor ? m : 0; g < G; ++g) {
    const Vector& ph = P.phase[g];
    Matrix tmp = ph.conjugate().asDiagonal() * prev[P.gauss_node[g]];
    F[g].noalias() = H * tmp;
    F[g] = kMinusI * (ph.asDiagonal() * F[g]);
  }
  (void)nt;
  next.resize(prev.size());
  next[0] = Matrix::Zero(rows, cols);
  Matrix acc = Matrix::Zero(rows, cols);
  int first = 0;
  if (taylor) {
    taylor_first_panel(H, P, n, *coeffs, next);
    acc = next[interior_index(P.grid, 0, m)];
    first = 1;
  }
  for (int p = first; p < P.grid.panels; ++p) {
    const long base = static_cast<long>(p) * m;
    for (int j = 0; j < m; ++j) {
      Matrix& out = next[interior_index(P.grid, p, j)];
      out = acc;
      for (int k = 0; k < m; ++k) out += (P.half * P.S(j, k)) * F[base + k];
    }
    for (int k = 0; k < m; ++k) acc += (P.half * P.w(k)) * F[base + k];
    next[interior_index(P.grid, p, m)] = acc;
  }
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

struct RunOut {
  Matrix result;
  int order = 0;
  double tail = 0.0;
  double max_ratio = 0.0;
  std::vector<double> sup_norms;
  std::vector<DysonTerm> terms;
};

}  // namespace

void TimeGrid::validate() const {
  if (panels < 1) throw InputError("TimeGrid: panels must be >= 1");
  if (nodes_per_panel < 2) throw InputError("TimeGrid: nodes_per_panel must be >= 2");
  if (!std::isfinite(t_start) || !std::isfinite(t_end)) throw InputError("TimeGrid: non-finite endpoint");
}

std::vector<double> TimeGrid::node_times() const {
  validate();
  const GaussRule rule = gauss_legendre(nodes_per_panel);
  const double half = (t_end - t_start) / (2.0 * panels);
  std::vector<double> t;
  t.reserve(node_count());
  t.push_back(t_start);
  for (int p = 0; p < panels; ++p) {
    const double mid = t_start + (2.0 * p + 1.0) * half;
    for (int q = 0; q < nodes_per_panel; ++q) t.push_back(mid + half * rule.nodes(q));
    t.push_back(p + 1 == panels ? t_end : t_start + 2.0 * (p + 1) * half);
  }
  return t;
}

double DysonTerm::sup_norm() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, v.norm());
  return s;
}

double apriori_bound(int n, double dt, double C, double b, double L_xi, double norm_xi) {
  if (n < 0 || dt < 0 || C < 0 || b < 0 || L_xi < 0 || norm_xi < 0)
    throw InputError("apriori_bound: arguments must be non-negative");
  if (n == 0) return norm_xi;
  if (dt == 0 || C == 0 || norm_xi == 0) return 0.0;
  double lg = n * (std::log(dt) + std::log(C)) - log_factorial(n) + std::log(norm_xi);
  for (int k = 0; k < n; ++k) lg += 0.5 * std::log(L_xi + k * b + 1.0);
  return std::exp(lg);
}

double apriori_tail(int N, double dt, double C, double b, double L_xi, double norm_xi) {
  if (dt == 0 || C == 0 || norm_xi == 0) return 0.0;
  double lg = std::log(norm_xi);
  // log apriori_bound(N), built incrementally like the tail terms below.
  for (int k = 1; k <= N; ++k)
    lg += std::log(dt * C / k) + 0.5 * std::log(L_xi + (k - 1) * b + 1.0);
  double tail = 0.0;
  for (int n = N + 1; n < N + 100000; ++n) {
    lg += std::log(dt * C / n) + 0.5 * std::log(L_xi + (n - 1) * b + 1.0);
    const double inc = std::exp(lg);
    tail += inc;
    if (!std::isfinite(tail)) return std::numeric_limits<double>::infinity();
    const double ratio = dt * C * std::sqrt(L_xi + n * b + 1.0) / (n + 1.0);
    if (inc < 1e-3 * tail && ratio < 0.5) break;
  }
  return tail;
}

int required_order(double dt, const GradeCert& cert, double L_xi, double norm_xi, double tol, int max_order,
                   double* tail) {
  if (!(tol > 0)) throw InputError("required_order: tol must be > 0");
  double last = 0.0;
  for (int N = 0; N <= max_order; ++N) {
    last = apriori_tail(N, dt, cert.C, cert.b, L_xi, norm_xi);
    if (last < tol) {
      if (tail) *tail = last;
      return N;
    }
  }
  throw TruncationError(max_order, last, tol);
}

TimeGrid suggest_grid(const GradeCert& cert, double free_spread, double max_grade, double L_xi, double norm_xi,
                      double t_start, double t_end, double tol, const EngineOptions& opts) {
  const double dt = std::abs(t_end - t_start);
  const int N = required_order(dt, cert, L_xi, norm_xi, tol, opts.max_order);
  double width = std::numeric_limits<double>::infinity();
  if (cert.C > 0) {
    const double reach = std::min(L_xi + N * cert.b, max_grade);
    width = 0.1 / (cert.C * std::sqrt(reach + 1.0));
  }
  if (free_spread > 0) width = std::min(width, 1.0 / free_spread);
  if (opts.max_panel_width > 0) width = std::min(width, opts.max_panel_width);
  int panels = 1;
  if (std::isfinite(width) && dt > 0) panels = static_cast<int>(std::min(1e6, std::max(1.0, std::ceil(dt / width))));
  return TimeGrid{t_start, t_end, panels, opts.nodes_per_panel};
}

LinOp interaction_picture(const LinOp& H0, const LinOp& H1, double tau) {
  require_same_space(H0, H1, "interaction_picture");
  require_hermitian_free(H0);
  const Matrix& h0 = H0.matrix();
  const Matrix& h1 = H1.matrix();
  const auto n = h0.rows();
  if (is_diagonal(h0)) {
    Matrix out(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        out(j, k) = h1(j, k) * std::polar(1.0, tau * (h0(j, j).real() - h0(k, k).real()));
    return LinOp(H1.space_ptr(), std::move(out));
  }
  const Frame f = make_frame(H0, false);
  Vector ph(n);
  for (Eigen::Index j = 0; j < n; ++j) ph(j) = std::polar(1.0, tau * f.E(j));
  Matrix inner = ph.asDiagonal() * f.conj_in(h1) * ph.conjugate().asDiagonal();
  return LinOp(H1.space_ptr(), f.from_eigen(inner) * f.V.adjoint());
}

DysonTerm dyson_step(const DysonTerm& prev, const LinOp& H0, const LinOp& H1, const TimeGrid& grid,
                     double t_prime) {
  require_same_space(H0, H1, "dyson_step");
  require_hermitian_free(H0);
  grid.validate();
  if (prev.values.size() != grid.node_count()) throw InputError("dyson_step: prev is not sampled on grid");
  if (std::abs(grid.t_start - t_prime) > 1e-14 * std::max(1.0, std::abs(t_prime)))
    throw InputError("dyson_step: grid must start at t_prime");
  const Frame f = make_frame(H0, false);
  const Plan P = make_plan(grid, f.E);
  std::vector<Matrix> pe(prev.values.size()), ne, F;
  for (std::size_t i = 0; i < pe.size(); ++i) {
    require_dim(H0.space(), prev.values[i].size(), "dyson_step");
    pe[i] = f.to_eigen(prev.values[i]);
  }
  integrate_step(f.conj_in(H1.matrix()), P, pe, ne, F);
  DysonTerm out;
  out.order = prev.order + 1;
  out.values.reserve(ne.size());
  for (auto& v : ne) out.values.emplace_back(f.from_eigen(v).col(0));
  return out;
}

struct DysonEngine::Impl {
  LinOp H0;
  LinOp H1;
  EngineOptions opts;
  GradeCert cert;
  GradeCert cert_adj;
  Frame frame;
  Matrix H1e;
  Matrix H1e_adj;
  // Sparse copies of H1e for mostly-empty interactions.
  bool sparse = false;
  Eigen::SparseMatrix<cplx> S1e;
  Eigen::SparseMatrix<cplx> S1e_adj;
  double spread = 0.0;

  Impl(const LinOp& h0, const LinOp& h1, EngineOptions o) : H0(h0), H1(h1), opts(o) {
    require_same_space(H0, H1, "DysonEngine");
    require_hermitian_free(H0);
    require_free_commutes_with_grading(H0);
    if (opts.max_order < 0) throw InputError("DysonEngine: max_order must be >= 0");
    cert = H1.certificate();
    cert_adj = certify(H1.adjoint());
    frame = make_frame(H0, true);
    H1e = frame.conj_in(H1.matrix());
    H1e_adj = H1e.adjoint();
    const auto nnz = (H1e.array() != cplx(0.0)).count();
    sparse = H1e.rows() >= 64 && nnz < H1e.size() / 5;
    if (sparse) {
      S1e = H1e.sparseView();
      S1e_adj = H1e_adj.sparseView();
    }
    spread = frame.E.size() ? frame.E.maxCoeff() - frame.E.minCoeff() : 0.0;
  }

  RunOut run(const Matrix& X, const TimeGrid& user_grid, double tol, bool adjoint, bool keep, int min_order) const {
    user_grid.validate();
    require_dim(H0.space(), X.rows(), "evolve");
    if (!(tol > 0)) throw InputError("evolve: tol must be > 0");
    TimeGrid grid = user_grid;
    if (adjoint) std::swap(grid.t_start, grid.t_end);
    const GradeCert& c = adjoint ? cert_adj : cert;
    const Matrix& H = adjoint ? H1e_adj : H1e;
    const double dt = std::abs(grid.t_end - grid.t_start);

    const auto ncols = X.cols();
    std::vector<double> Lc(ncols), nc(ncols);
    double Lmax = 0.0, nmax = 0.0;
    for (Eigen::Index k = 0; k < ncols; ++k) {
      Lc[k] = support_grade(H0.space(), X.col(k));
      nc[k] = X.col(k).norm();
      Lmax = std::max(Lmax, Lc[k]);
      nmax = std::max(nmax, nc[k]);
    }
    RunOut out;
    int N = required_order(dt, c, Lmax, nmax, tol, opts.max_order, &out.tail);
    if (min_order > N) {
      N = std::min(min_order, opts.max_order);
      out.tail = apriori_tail(N, dt, c.C, c.b, Lmax, nmax);
    }
    out.order = N;
    out.sup_norms.assign(N + 1, 0.0);
    const Plan P = make_plan(grid, frame.E);
    const std::size_t target = grid.target_index();
    const Matrix Xe = frame.to_eigen(X);
    Matrix sum(X.rows(), ncols);
    if (keep) {
      out.terms.resize(N + 1);
      for (int n = 0; n <= N; ++n) {
        out.terms[n].order = n;
        out.terms[n].values.assign(P.times.size(), Vector::Zero(X.rows()));
      }
    }
    std::vector<double> node_dt(P.times.size());
    for (std::size_t i = 0; i < node_dt.size(); ++i) node_dt[i] = std::abs(P.times[i] - grid.t_start);

    for (Eigen::Index c0 = 0; c0 < ncols; c0 += kChunkColumns) {
      const Eigen::Index w = std::min(kChunkColumns, ncols - c0);
      std::vector<Matrix> prev(P.times.size(), Xe.middleCols(c0, w)), next, F;
      Matrix acc = Xe.middleCols(c0, w);
      for (Eigen::Index k = 0; k < w; ++k) out.sup_norms[0] = std::max(out.sup_norms[0], nc[c0 + k]);
      if (keep)
        for (std::size_t i = 0; i < P.times.size(); ++i) out.terms[0].values[i] = X.col(c0);
      // Running 0.5 * sum_{k<n} log(L + k b + 1) per column.
      std::vector<double> logprod(w, 0.0);
      std::vector<Matrix> coeffs;
      if (P.taylor) coeffs = taylor_seed(P, prev[0]);
      std::vector<Matrix>* cp = P.taylor ? &coeffs : nullptr;
      for (int n = 1; n <= N; ++n) {
        if (sparse)
          integrate_step(adjoint ? S1e_adj : S1e, P, prev, next, F, cp, n - 1);
        else
          integrate_step(H, P, prev, next, F, cp, n - 1);
        acc += next[target];
        for (Eigen::Index k = 0; k < w; ++k) logprod[k] += 0.5 * std::log(Lc[c0 + k] + (n - 1) * c.b + 1.0);
        for (std::size_t i = 1; i < next.size(); ++i) {
          const Eigen::VectorXd norms = next[i].colwise().norm();
          for (Eigen::Index k = 0; k < w; ++k) {
            const double v = norms(k);
            out.sup_norms[n] = std::max(out.sup_norms[n], v);
            if (v == 0.0) continue;
            double bound = 0.0;
            if (node_dt[i] > 0 && c.C > 0 && nc[c0 + k] > 0)
              bound = std::exp(n * std::log(node_dt[i] * c.C) + logprod[k] - log_factorial(n) +
                               std::log(nc[c0 + k]));
            const double ratio = bound > 0 ? v / bound : std::numeric_limits<double>::infinity();
            out.max_ratio = std::max(out.max_ratio, ratio);
          }
        }
        if (keep)
          for (std::size_t i = 0; i < next.size(); ++i) out.terms[n].values[i] = frame.from_eigen(next[i]).col(0);
        std::swap(prev, next);
      }
      sum.middleCols(c0, w) = acc;
    }
    out.result = frame.from_eigen(sum);
    return out;
  }

  double quadrature_gap(const Matrix& X, const TimeGrid& grid, double tol, bool adjoint, int order,
                        const Matrix& fine) const {
    TimeGrid coarse = grid;
    if (grid.panels >= 2)
      coarse.panels = grid.panels / 2;
    else if (grid.nodes_per_panel >= 4)
      coarse.nodes_per_panel = grid.nodes_per_panel / 2;
    else
      return 0.0;
    const RunOut r = run(X, coarse, tol, adjoint, false, order);
    return (r.result - fine).colwise().norm().maxCoeff();
  }

  SeriesResult series(const Vector& xi, const TimeGrid& grid, double tol, bool adjoint) const {
    RunOut r = run(xi, grid, tol, adjoint, opts.keep_terms, opts.min_order);
    SeriesResult s;
    s.partial_sum = r.result.col(0);
    s.achieved_order = r.order;
    s.tail_bound = r.tail;
    s.max_bound_ratio = r.max_ratio;
    s.per_order_sup_norms = r.sup_norms;
    s.cert = adjoint ? cert_adj : cert;
    s.L_xi = support_grade(H0.space(), xi);
    s.norm_xi = xi.norm();
    s.grid = grid;
    const double dt = std::abs(grid.t_end - grid.t_start);
    for (int n = 0; n <= r.order; ++n)
      s.per_order_bounds.push_back(apriori_bound(n, dt, s.cert.C, s.cert.b, s.L_xi, s.norm_xi));
    s.terms = std::move(r.terms);
    if (opts.estimate_quadrature) s.quadrature_estimate = quadrature_gap(xi, grid, tol, adjoint, r.order, r.result);
    return s;
  }

  BlockResult block(const Matrix& X, const TimeGrid& grid, double tol, bool adjoint) const {
    RunOut r = run(X, grid, tol, adjoint, false, opts.min_order);
    BlockResult b;
    b.achieved_order = r.order;
    b.tail_bound = r.tail;
    b.max_bound_ratio = r.max_ratio;
    b.per_order_sup_norms = r.sup_norms;
    if (opts.estimate_quadrature) b.quadrature_estimate = quadrature_gap(X, grid, tol, adjoint, r.order, r.result);
    b.result = std::move(r.result);
    return b;
  }

  TimeGrid auto_grid(const Matrix& X, double t0, double t1, double tol, bool adjoint) const {
    double L = 0.0, nrm = 0.0;
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
      L = std::max(L, support_grade(H0.space(), X.col(k)));
      nrm = std::max(nrm, X.col(k).norm());
    }
    return suggest_grid(adjoint ? cert_adj : cert, spread, H0.space().max_grade(), L, nrm, t0, t1, tol, opts);
  }
};

DysonEngine::DysonEngine(const LinOp& H0, const LinOp& H1, EngineOptions opts)
    : impl_(std::make_unique<Impl>(H0, H1, opts)) {}
DysonEngine::~DysonEngine() = default;
DysonEngine::DysonEngine(DysonEngine&&) noexcept = default;
DysonEngine& DysonEngine::operator=(DysonEngine&&) noexcept = default;

const LinOp& DysonEngine::H0() const { return impl_->H0; }
const LinOp& DysonEngine::H1() const { return impl_->H1; }
const GradeCert& DysonEngine::cert() const { return impl_->cert; }
const GradeCert& DysonEngine::adjoint_cert() const { return impl_->cert_adj; }
const EngineOptions& DysonEngine::options() const { return impl_->opts; }
const SpacePtr& DysonEngine::space() const { return impl_->H0.space_ptr(); }
double DysonEngine::free_spread() const { return impl_->spread; }

TimeGrid DysonEngine::grid_for(double L_xi, double norm_xi, double t_start, double t_end, double tol,
                               bool adjoint) const {
  return suggest_grid(adjoint ? impl_->cert_adj : impl_->cert, impl_->spread, impl_->H0.space().max_grade(), L_xi,
                      norm_xi, t_start, t_end, tol, impl_->opts);
}

SeriesResult DysonEngine::evolve(const Vector& xi, const TimeGrid& grid, double tol) const {
  return impl_->series(xi, grid, tol, false);
}

SeriesResult DysonEngine::evolve_adjoint(const Vector& xi, const TimeGrid& grid, double tol) const {
  return impl_->series(xi, grid, tol, true);
}

BlockResult DysonEngine::evolve_block(const Matrix& X, const TimeGrid& grid, double tol) const {
  return impl_->block(X, grid, tol, false);
}

BlockResult DysonEngine::evolve_block_adjoint(const Matrix& X, const TimeGrid& grid, double tol) const {
  return impl_->block(X, grid, tol, true);
}

Matrix DysonEngine::evolve_fixed(const Matrix& X, const TimeGrid& grid, double tol, int min_order, bool adjoint) const {
  return impl_->run(X, grid, tol, adjoint, false, std::max(min_order, impl_->opts.min_order)).result;
}

Vector DysonEngine::apply(double t, double t_prime, const Vector& xi, double tol) const {
  const TimeGrid g = impl_->auto_grid(xi, t_prime, t, tol, false);
  return impl_->run(xi, g, tol, false, false, impl_->opts.min_order).result.col(0);
}

Vector DysonEngine::apply_adjoint(double t, double t_prime, const Vector& xi, double tol) const {
  const TimeGrid g = impl_->auto_grid(xi, t_prime, t, tol, true);
  return impl_->run(xi, g, tol, true, false, impl_->opts.min_order).result.col(0);
}

Matrix DysonEngine::apply_block(double t, double t_prime, const Matrix& X, double tol) const {
  const TimeGrid g = impl_->auto_grid(X, t_prime, t, tol, false);
  return impl_->run(X, g, tol, false, false, impl_->opts.min_order).result;
}

Matrix DysonEngine::apply_block_adjoint(double t, double t_prime, const Matrix& X, double tol) const {
  const TimeGrid g = impl_->auto_grid(X, t_prime, t, tol, true);
  return impl_->run(X, g, tol, true, false, impl_->opts.min_order).result;
}

Matrix DysonEngine::propagator(double t, double t_prime, double tol) const {
  const auto n = static_cast<Eigen::Index>(impl_->H0.dim());
  return apply_block(t, t_prime, Matrix::Identity(n, n), tol);
}

Matrix DysonEngine::free_evolution(double t, const Matrix& X) const {
  const Frame& f = impl_->frame;
  Vector ph(f.E.size());
  for (Eigen::Index j = 0; j < ph.size(); ++j) ph(j) = std::polar(1.0, -t * f.E(j));
  return f.from_eigen(ph.asDiagonal() * f.to_eigen(X));
}

Matrix DysonEngine::free_evolution(double t) const {
  const auto n = static_cast<Eigen::Index>(impl_->H0.dim());
  return free_evolution(t, Matrix::Identity(n, n));
}

Matrix DysonEngine::interaction_at(double tau) const {
  const Frame& f = impl_->frame;
  Vector ph(f.E.size());
  for (Eigen::Index j = 0; j < ph.size(); ++j) ph(j) = std::polar(1.0, tau * f.E(j));
  const Matrix inner = ph.asDiagonal() * impl_->H1e * ph.conjugate().asDiagonal();
  return f.diagonal ? inner : Matrix(f.V * inner * f.V.adjoint());
}

SeriesResult evolve_vector(const LinOp& H0, const LinOp& H1, const Vector& xi, const TimeGrid& grid, double tol,
                           const EngineOptions& opts) {
  return DysonEngine(H0, H1, opts).evolve(xi, grid, tol);
}

SeriesResult evolve_adjoint(const LinOp& H0, const LinOp& H1, const Vector& xi, const TimeGrid& grid, double tol,
                            const EngineOptions& opts) {
  return DysonEngine(H0, H1, opts).evolve_adjoint(xi, grid, tol);
}

}  // namespace dysonprop
