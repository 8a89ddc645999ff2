#include "dysonprop/graded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dysonprop {

const char* assumption_name(Assumption a) {
  switch (a) {
    case Assumption::GradingNonNegative: return "grading-non-negative";
    case Assumption::FreeHamiltonianHermitian: return "free-hamiltonian-hermitian";
    case Assumption::GradingCommutesWithFree: return "grading-commutes-with-free-hamiltonian";
    case Assumption::InteractionGradeShift: return "interaction-bounded-grade-shift";
    case Assumption::InteractionRelativeBound: return "interaction-relatively-bounded";
    case Assumption::AdjointGradeShift: return "adjoint-interaction-bounded-grade-shift";
    case Assumption::ObservableGradeShift: return "observable-bounded-grade-shift";
  }
  return "unknown";
}

AssumptionViolation::AssumptionViolation(Assumption which, const std::string& detail)
    : std::runtime_error(std::string("assumption violated [") + assumption_name(which) + "]: " + detail),
      which_(which) {}

TruncationError::TruncationError(int max_order, double tail_bound, double tol)
    : std::runtime_error("series truncation failed: tail bound " + std::to_string(tail_bound) +
                         " at order " + std::to_string(max_order) + " exceeds tol " +
                         std::to_string(tol)),
      max_order_(max_order),
      tail_bound_(tail_bound) {}

StiffnessError::StiffnessError(double t_reached, double dt_last, const std::string& detail)
    : std::runtime_error("ode oracle step-size underflow at t=" + std::to_string(t_reached) +
                         " (dt=" + std::to_string(dt_last) + "): " + detail),
      t_reached_(t_reached),
      dt_last_(dt_last) {}

GradedSpace::GradedSpace(std::vector<double> grades) : grades_(std::move(grades)) {
  if (grades_.empty()) throw InputError("GradedSpace: dim must be >= 1");
  for (double g : grades_) {
    if (!std::isfinite(g)) throw InputError("GradedSpace: non-finite grade");
    if (g < 0) throw AssumptionViolation(Assumption::GradingNonNegative, "negative grade " + std::to_string(g));
  }
  max_grade_ = *std::max_element(grades_.begin(), grades_.end());
}

SpacePtr make_space(std::vector<double> grades) {
  return std::make_shared<const GradedSpace>(std::move(grades));
}

LinOp::LinOp(SpacePtr space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
  if (!space_) throw InputError("LinOp: null space");
  const auto n = static_cast<Eigen::Index>(space_->dim());
  if (m_.rows() != n || m_.cols() != n)
    throw InputError("LinOp: matrix is " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()) +
                     ", space dim " + std::to_string(n));
  if (!m_.allFinite()) throw InputError("LinOp: non-finite entries");
}

LinOp::LinOp(SpacePtr space, Matrix m, GradeCert cert) : LinOp(std::move(space), std::move(m)) {
  cert_ = cert;
}

LinOp LinOp::certified() const { return LinOp(space_, m_, certify(*this)); }

GradeCert LinOp::certificate() const { return cert_ ? *cert_ : certify(*this); }

LinOp LinOp::adjoint() const { return LinOp(space_, m_.adjoint()); }

bool LinOp::same_space(const LinOp& other) const {
  return space_ == other.space_ || *space_ == *other.space_;
}

LinOp sector_projector(const SpacePtr& space, double L) {
  if (L < 0) throw InputError("sector_projector: L must be >= 0");
  const auto n = static_cast<Eigen::Index>(space->dim());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    if (space->grade(j) <= L) p(j, j) = 1.0;
  return LinOp(space, std::move(p));
}

double grade_shift_bound(const LinOp& op) {
  const Matrix& m = op.matrix();
  const double mx = m.cwiseAbs().maxCoeff();
  if (mx == 0.0) return 0.0;
  const double thr = kSupportThreshold * mx;
  const auto& g = op.space().grades();
  double b = 0.0;
  for (Eigen::Index k = 0; k < m.cols(); ++k)
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      if (std::abs(m(j, k)) > thr) b = std::max(b, g[j] - g[k]);
  return b;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  // Top eigenvalue of the smaller Gram matrix; BDCSVD in Eigen 3.4.0 misreports it on degenerate spectra.
  const Matrix gram = m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

double relative_bound_constant(const LinOp& op) {
  const auto& g = op.space().grades();
  Eigen::VectorXd w(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) w(k) = 1.0 / std::sqrt(g[k] + 1.0);
  return spectral_norm(op.matrix() * w.asDiagonal());
}

GradeCert certify(const LinOp& op) { return {grade_shift_bound(op), relative_bound_constant(op)}; }

void require_dim(const GradedSpace& s, Eigen::Index n, const char* where) {
  if (n != static_cast<Eigen::Index>(s.dim()))
    throw InputError(std::string(where) + ": vector length " + std::to_string(n) + " != dim " +
                     std::to_string(s.dim()));
}

void require_same_space(const LinOp& a, const LinOp& b, const char* where) {
  if (!a.same_space(b)) throw InputError(std::string(where) + ": operators live on different graded spaces");
}

double weighted_norm(const GradedSpace& space, const Vector& v, double alpha) {
  require_dim(space, v.size(), "weighted_norm");
  if (alpha < 0) throw InputError("weighted_norm: alpha must be >= 0");
  double s = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) s += std::pow(space.grade(j) + 1.0, alpha) * std::norm(v(j));
  return std::sqrt(s);
}

double support_grade(const GradedSpace& space, const Vector& v) {
  require_dim(space, v.size(), "support_grade");
  double L = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v(j)) > kSupportThreshold) L = std::max(L, space.grade(j));
  return L;
}

bool is_hermitian(const Matrix& m, double rel_tol) {
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * std::max(scale, 1e-300);
}

void require_hermitian_free(const LinOp& H0) {
  const Matrix& m = H0.matrix();
  const double scale = spectral_norm(m);
  const double defect = spectral_norm(m - m.adjoint());
  if (defect > 1e-12 * scale)
    throw AssumptionViolation(Assumption::FreeHamiltonianHermitian,
                              "||H0 - H0*|| = " + std::to_string(defect));
}

void require_free_commutes_with_grading(const LinOp& H0) {
  const Matrix& m = H0.matrix();
  const auto& g = H0.space().grades();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index k = 0; k < m.cols(); ++k)
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      if (g[j] != g[k] && std::abs(m(j, k)) > 1e-12 * scale)
        throw AssumptionViolation(Assumption::GradingCommutesWithFree,
                                  "H0 couples grades " + std::to_string(g[j]) + " and " + std::to_string(g[k]));
}

}  // namespace dysonprop
