#include "dysonprop/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dysonprop/random.hpp"

namespace dysonprop {

namespace {

constexpr cplx kI{0.0, 1.0};

struct Span {
  double t_start;
  double t_end;
};

// U(t_end, t_start) X_k for every span, all on one panel count and one order.
std::vector<Matrix> evolve_spans(const DysonEngine& e, const std::vector<Span>& spans, const std::vector<Matrix>& Xs,
                                 double tol) {
  double dt = 0.0, L = 0.0, nrm = 0.0;
  for (const auto& s : spans) dt = std::max(dt, std::abs(s.t_end - s.t_start));
  for (const auto& X : Xs)
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
      L = std::max(L, support_grade(*e.space(), X.col(k)));
      nrm = std::max(nrm, X.col(k).norm());
    }
  const GradeCert& c = e.cert();
  const int N = required_order(dt, c, L, nrm, tol, e.options().max_order);
  const TimeGrid ref = e.grid_for(L, nrm, 0.0, dt, tol);
  std::vector<Matrix> out;
  out.reserve(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const TimeGrid g{spans[i].t_start, spans[i].t_end, ref.panels, ref.nodes_per_panel};
    out.push_back(e.evolve_fixed(Xs.size() == 1 ? Xs[0] : Xs[i], g, tol, N));
  }
  return out;
}

Matrix full_H(const DysonEngine& e) { return e.H0().matrix() + e.H1().matrix(); }

void require_uniform(const std::vector<double>& t) {
  if (t.size() < 3) throw InputError("heisenberg_residuals: need at least 3 time points");
  const double d = t[1] - t[0];
  for (std::size_t k = 1; k + 1 < t.size(); ++k)
    if (std::abs((t[k + 1] - t[k]) - d) > 1e-9 * std::abs(d))
      throw InputError("heisenberg_residuals: time grid is not uniform");
  if (d == 0.0) throw InputError("heisenberg_residuals: zero time step");
}

}  // namespace

LinOp propagator_W(const LinOp& H0, const LinOp& H1, double t, double tol) {
  DysonEngine e(H0, H1);
  return LinOp(H0.space_ptr(), propagator_W(e, t, tol));
}

Matrix propagator_W(const DysonEngine& engine, double t, double tol) {
  const auto n = static_cast<Eigen::Index>(engine.H0().dim());
  return apply_W(engine, t, Matrix::Identity(n, n), tol);
}

Matrix apply_W(const DysonEngine& engine, double t, const Matrix& X, double tol) {
  if (t == 0.0) return X;
  return engine.free_evolution(t, engine.apply_block(t, 0.0, X, tol));
}

std::vector<Matrix> apply_W_stencil(const DysonEngine& engine, const std::vector<double>& ts, const Matrix& X,
                                    double tol) {
  std::vector<Span> spans;
  for (double s : ts) spans.push_back({0.0, s});
  std::vector<Matrix> U = evolve_spans(engine, spans, {X}, tol);
  for (std::size_t i = 0; i < ts.size(); ++i) U[i] = engine.free_evolution(ts[i], U[i]);
  return U;
}

double schrodinger_residual(const DysonEngine& engine, const Vector& xi, double t, double h, double tol) {
  if (!(h > 0)) throw InputError("schrodinger_residual: h must be > 0");
  const auto W = apply_W_stencil(engine, {t - h, t, t + h}, xi, tol);
  const Vector d = (W[2].col(0) - W[0].col(0)) / (2.0 * h);
  return (d + kI * (full_H(engine) * W[1].col(0))).norm();
}

double forward_equation_residual(const DysonEngine& engine, const Vector& xi, double t, double t_prime, double h,
                                 double tol) {
  const auto U = evolve_spans(engine, {{t_prime, t - h}, {t_prime, t}, {t_prime, t + h}}, {xi}, tol);
  const Vector d = (U[2].col(0) - U[0].col(0)) / (2.0 * h);
  return (d + kI * (engine.interaction_at(t) * U[1].col(0))).norm();
}

double backward_equation_residual(const DysonEngine& engine, const Vector& xi, double t, double t_prime, double h,
                                  double tol) {
  const Vector h1xi = engine.interaction_at(t_prime) * xi;
  const auto U = evolve_spans(engine, {{t_prime - h, t}, {t_prime + h, t}, {t_prime, t}},
                              {Matrix(xi), Matrix(xi), Matrix(h1xi)}, tol);
  const Vector d = (U[1].col(0) - U[0].col(0)) / (2.0 * h);
  return (d - kI * U[2].col(0)).norm();
}

Trajectory schrodinger_trajectory(const LinOp& H0, const LinOp& H1, const Vector& xi, const std::vector<double>& times,
                                  double tol, double h) {
  return schrodinger_trajectory(DysonEngine(H0, H1), xi, times, tol, h);
}

Trajectory schrodinger_trajectory(const DysonEngine& engine, const Vector& xi, const std::vector<double>& times,
                                  double tol, double h) {
  require_dim(*engine.space(), xi.size(), "schrodinger_trajectory");
  if (xi.norm() == 0.0) throw InputError("schrodinger_trajectory: initial vector is zero");
  if (times.empty()) throw InputError("schrodinger_trajectory: empty time list");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InputError("schrodinger_trajectory: times must be strictly increasing");
  if (std::find(times.begin(), times.end(), 0.0) == times.end())
    throw InputError("schrodinger_trajectory: times must contain 0");
  const Matrix H = full_H(engine);
  Trajectory tr;
  tr.times = times;
  for (double t : times) {
    const auto W = apply_W_stencil(engine, {t - h, t, t + h}, xi, tol);
    tr.states.push_back(t == 0.0 ? xi : Vector(W[1].col(0)));
    const Vector d = (W[2].col(0) - W[0].col(0)) / (2.0 * h);
    tr.residuals.push_back((d + kI * (H * W[1].col(0))).norm());
  }
  return tr;
}

void require_observable_shift(const LinOp& B, double b0) {
  const double b = grade_shift_bound(B);
  const double bs = grade_shift_bound(B.adjoint());
  if (b > b0 || bs > b0)
    throw AssumptionViolation(Assumption::ObservableGradeShift,
                              "observable grade shift " + std::to_string(std::max(b, bs)) + " exceeds declared " +
                                  std::to_string(b0));
}

ObservableTrack heisenberg_track(const LinOp& H0, const LinOp& H1, const LinOp& B, const std::vector<double>& times,
                                 double tol, std::optional<double> b0) {
  return heisenberg_track(DysonEngine(H0, H1), B, times, tol, b0);
}

ObservableTrack heisenberg_track(const DysonEngine& engine, const LinOp& B, const std::vector<double>& times,
                                 double tol, std::optional<double> b0) {
  require_same_space(engine.H0(), B, "heisenberg_track");
  if (b0) require_observable_shift(B, *b0);
  if (times.empty()) throw InputError("heisenberg_track: empty time list");
  const auto n = static_cast<Eigen::Index>(B.dim());
  std::vector<Span> spans;
  for (double t : times) {
    spans.push_back({0.0, t});
    spans.push_back({0.0, -t});
  }
  const auto U = evolve_spans(engine, spans, {Matrix::Identity(n, n)}, tol);
  ObservableTrack tr{times, {}, B};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t == 0.0) {
      tr.matrices.push_back(B);
      continue;
    }
    const Matrix Wt = engine.free_evolution(t, U[2 * k]);
    const Matrix Wm = engine.free_evolution(-t, U[2 * k + 1]);
    tr.matrices.emplace_back(B.space_ptr(), Wm * B.matrix() * Wt);
  }
  return tr;
}

std::vector<double> heisenberg_residuals(const ObservableTrack& track, const LinOp& H, HeisenbergMode mode,
                                         std::uint64_t seed, int pairs) {
  require_uniform(track.times);
  if (track.matrices.size() != track.times.size()) throw InputError("heisenberg_residuals: malformed track");
  const double dt2 = track.times[2] - track.times[0];
  const Matrix iH = kI * H.matrix();
  std::vector<double> res;
  if (mode == HeisenbergMode::Strong) {
    for (std::size_t k = 1; k + 1 < track.times.size(); ++k) {
      const Matrix& Bk = track.matrices[k].matrix();
      const Matrix d = (track.matrices[k + 1].matrix() - track.matrices[k - 1].matrix()) / dt2;
      res.push_back(spectral_norm(d - (iH * Bk - Bk * iH)));
    }
    return res;
  }
  Rng rng(seed);
  const auto n = H.matrix().rows();
  std::vector<Vector> etas, xis;
  for (int p = 0; p < pairs; ++p) {
    etas.push_back(random_unit_vector(rng, n));
    xis.push_back(random_unit_vector(rng, n));
  }
  for (std::size_t k = 1; k + 1 < track.times.size(); ++k) {
    const Matrix& Bk = track.matrices[k].matrix();
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
      const Vector& eta = etas[p];
      const Vector& xi = xis[p];
      const cplx lhs =
          (eta.dot(track.matrices[k + 1].matrix() * xi) - eta.dot(track.matrices[k - 1].matrix() * xi)) / dt2;
      const cplx rhs = (iH.adjoint() * eta).dot(Bk * xi) - (Bk.adjoint() * eta).dot(iH * xi);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    res.push_back(worst);
  }
  return res;
}

double split_form_residual(const DysonEngine& engine, const LinOp& B, double t, double tol) {
  require_same_space(engine.H0(), B, "split_form_residual");
  const auto n = static_cast<Eigen::Index>(B.dim());
  const auto U = evolve_spans(engine, {{0.0, t}, {t, 0.0}, {0.0, -t}}, {Matrix::Identity(n, n)}, tol);
  const Matrix& Ut0 = U[0];
  const Matrix& U0t = U[1];
  const Matrix Wt = engine.free_evolution(t, Ut0);
  const Matrix Wm = engine.free_evolution(-t, U[2]);
  const Matrix& b = B.matrix();
  const Matrix iH0 = kI * engine.H0().matrix();
  const Matrix iH1 = kI * engine.H1().matrix();
  const Matrix iH = iH0 + iH1;
  const Matrix Bt = Wm * b * Wt;
  const Matrix commutator_form = iH * Bt - Bt * iH;
  // B0'(t) = e^{itH0} [iH0, B] e^{-itH0}
  const Matrix c0 = iH0 * b - b * iH0;
  const Matrix Et = engine.free_evolution(-t);
  const Matrix B0p = Et * c0 * Et.adjoint();
  const Matrix split = Wm * (iH1 * b - b * iH1) * Wt + U0t * B0p * Ut0;
  return spectral_norm(split - commutator_form);
}

std::vector<double> heisenberg_vector_residuals(const DysonEngine& engine, const Matrix& B, double t, double h,
                                                const Matrix& Xi, double tol) {
  const Matrix iH = kI * full_H(engine);
  const std::vector<double> ts{t - h, t, t + h};
  // W(s) Xi on the stencil and W(t) iH Xi.
  std::vector<Span> fwd;
  for (double s : ts) fwd.push_back({0.0, s});
  fwd.push_back({0.0, t});
  const Matrix iHXi = iH * Xi;
  auto U = evolve_spans(engine, fwd, {Xi, Xi, Xi, iHXi}, tol);
  std::vector<Matrix> mid;
  for (std::size_t i = 0; i < 4; ++i) {
    const double s = i < 3 ? ts[i] : t;
    mid.push_back(B * engine.free_evolution(s, U[i]));
  }
  std::vector<Span> back;
  for (double s : ts) back.push_back({0.0, -s});
  back.push_back({0.0, -t});
  auto V = evolve_spans(engine, back, mid, tol);
  for (std::size_t i = 0; i < 4; ++i) {
    const double s = i < 3 ? ts[i] : t;
    V[i] = engine.free_evolution(-s, V[i]);
  }
  const Matrix d = (V[2] - V[0]) / (2.0 * h);
  const Matrix rhs = iH * V[1] - V[3];
  std::vector<double> res;
  for (Eigen::Index k = 0; k < Xi.cols(); ++k) res.push_back((d.col(k) - rhs.col(k)).norm());
  return res;
}

}  // namespace dysonprop
