#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dysonprop/errors.hpp"

namespace dysonprop {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Orthonormal basis with a non-negative grade per index (eigenvalues of A).
class GradedSpace {
 public:
  explicit GradedSpace(std::vector<double> grades);

  std::size_t dim() const { return grades_.size(); }
  const std::vector<double>& grades() const { return grades_; }
  double grade(std::size_t j) const { return grades_[j]; }
  double max_grade() const { return max_grade_; }

  bool operator==(const GradedSpace& other) const { return grades_ == other.grades_; }

 private:
  std::vector<double> grades_;
  double max_grade_ = 0.0;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

SpacePtr make_space(std::vector<double> grades);

struct GradeCert {
  double b = 0.0;
  double C = 0.0;
};

class LinOp {
 public:
  LinOp(SpacePtr space, Matrix m);
  LinOp(SpacePtr space, Matrix m, GradeCert cert);

  const GradedSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return space_->dim(); }
  const std::optional<GradeCert>& cert() const { return cert_; }

  // Returns a copy carrying a freshly computed certificate.
  LinOp certified() const;
  // Certificate from the cache, computed on the fly when absent.
  GradeCert certificate() const;

  LinOp adjoint() const;
  bool same_space(const LinOp& other) const;

 private:
  SpacePtr space_;
  Matrix m_;
  std::optional<GradeCert> cert_;
};

LinOp sector_projector(const SpacePtr& space, double L);

double grade_shift_bound(const LinOp& op);
double relative_bound_constant(const LinOp& op);
GradeCert certify(const LinOp& op);

double weighted_norm(const GradedSpace& space, const Vector& v, double alpha);

// L_xi: largest grade carrying an entry above the support threshold.
double support_grade(const GradedSpace& space, const Vector& v);

// Largest singular value.
double spectral_norm(const Matrix& m);

inline constexpr double kSupportThreshold = 1e-14;

// Assumption predicates on the free part: Hermitian and block diagonal in the grading.
void require_hermitian_free(const LinOp& H0);
void require_free_commutes_with_grading(const LinOp& H0);
bool is_hermitian(const Matrix& m, double rel_tol = 1e-12);

void require_same_space(const LinOp& a, const LinOp& b, const char* where);
void require_dim(const GradedSpace& s, Eigen::Index n, const char* where);

}  // namespace dysonprop
