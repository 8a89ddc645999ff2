#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dysonprop/fock.hpp"
#include "dysonprop/report.hpp"

namespace dysonprop {

using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;
using Vec3 = Eigen::Vector3d;

// Dirac representation: gamma^0 = diag(I, -I), gamma^j = [[0, sigma_j], [-sigma_j, 0]].
std::array<Mat4, 4> gamma_matrices();
// alpha^mu = gamma^0 gamma^mu (alpha^0 = I), beta = gamma^0.
std::array<Mat4, 4> alpha_matrices();
Mat4 beta_matrix();
// s_1 = (i/2) gamma^2 gamma^3 and cyclic.
std::array<Mat4, 3> spin_matrices();
Eigen::Matrix4d minkowski_metric();

struct DiracSpinors {
  Vec4 u_up;    // s = +1/2
  Vec4 u_down;  // s = -1/2
  Vec4 v_up;
  Vec4 v_down;
  double energy = 0.0;

  const Vec4& u(int s_index) const { return s_index == 0 ? u_up : u_down; }
  const Vec4& v(int s_index) const { return s_index == 0 ? v_up : v_down; }
};

// Helicity-labelled spinors normalised to u*u = v*v = E_M(p); s_3 labelling at p = 0.
DiracSpinors dirac_spinors(const Vec3& p, double M);

// e^{(0)} = (1,0,0,0), e^{(3)} = (0, k/|k|), e^{(1)} = (0, z x k / |z x k|), e^{(2)} = (0, k^ x e^{(1)}).
// Throws DomainError for momenta on the z-axis.
std::array<Eigen::Vector4d, 4> polarization_vectors(const Vec3& k);

struct QedConfig {
  std::vector<Vec3> momentum_points;
  std::vector<double> momentum_weights;
  std::vector<Vec3> fermion_momenta;
  std::vector<double> fermion_weights;
  std::vector<Vec3> positions;
  std::vector<double> position_weights;
  double mass = 1.0;
  double coupling = 0.1;
  int photon_cap = 3;
  // Real cutoff functions sampled at the positions.
  std::vector<double> chi_sp;
  std::vector<double> chi_ph;
  std::vector<double> chi_el;

  void validate() const;
};

// One photon momentum, one fermion momentum, photon cap 3, e = 0.1, Gaussian cutoffs.
QedConfig default_toy_config();

// Unitary lattice Fourier transform (2 pi)^{-3/2} sum_y w_y e^{-i k.y} chi(y).
cplx lattice_fourier(const QedConfig& cfg, const std::vector<double>& chi, const Vec3& k);

class QedModel {
 public:
  explicit QedModel(QedConfig cfg);

  const QedConfig& config() const { return cfg_; }
  const FockBasis& basis() const { return joint_; }
  const FockBasis& photon_basis() const { return photons_; }
  const FockBasis& fermion_basis() const { return fermions_; }
  const LinOp& H_fr() const { return *H_fr_; }
  const LinOp& H_int() const { return *H_int_; }
  const LinOp& eta() const { return *eta_; }
  double coupling() const { return cfg_.coupling; }

  double omega(std::size_t k) const { return omega_[k]; }
  double fermion_energy(std::size_t p) const { return energy_[p]; }

  // Photon-space operators.
  Matrix photon_annihilator(std::size_t k, int lambda) const;
  const Matrix& photon_eta() const { return eta_ph_; }
  // a_mu(F) = sum_k sqrt(w_k) conj(F(k)) sum_lambda e^{(lambda)}_mu(k) a_{k lambda}; F sampled on momentum points.
  Matrix a_mu(const Vector& F, int mu) const;
  Matrix a_mu_dagger(const Vector& F, int mu) const;
  Matrix a_polarization(const Vector& F, int lambda) const;
  double photon_inner(const Vector& F, const Vector& G) const;
  cplx photon_inner_c(const Vector& F, const Vector& G) const;
  // F_x(k) = e^{-ik.x} chi_ph^(k) / sqrt(2 omega(k))
  Vector photon_smearing(std::size_t x) const;
  const Matrix& field_A(std::size_t x, int mu) const { return A_[x][mu]; }

  // Fermion-space operators.
  Matrix fermion_b(std::size_t p, int s_index) const;
  Matrix fermion_d(std::size_t p, int s_index) const;
  const Matrix& field_psi(std::size_t x, int l) const { return psi_[x][l]; }
  const Matrix& current(std::size_t x, int mu) const { return j_[x][mu]; }
  // Norm of the one-particle vector (b-part, d*-part) defining psi_l(x).
  double psi_one_particle_norm(std::size_t x, int l) const;

  Matrix lift_photon(const Matrix& a) const;
  Matrix lift_fermion(const Matrix& f) const;

  double M_el() const { return M_el_; }
  double M_ph() const { return M_ph_; }
  double chi_sp_l1() const;

 private:
  QedConfig cfg_;
  FockBasis photons_;
  FockBasis fermions_;
  FockBasis joint_;
  std::vector<double> omega_;
  std::vector<double> energy_;
  std::vector<std::array<Eigen::Vector4d, 4>> pol_;
  std::vector<cplx> chi_ph_hat_;
  std::vector<cplx> chi_el_hat_;
  std::vector<std::array<Matrix, 4>> photon_a_;  // [k][lambda]
  std::vector<std::array<Matrix, 2>> b_, d_;      // [p][s]
  Matrix eta_ph_;
  std::vector<std::array<Matrix, 4>> A_;
  std::vector<std::array<Matrix, 4>> psi_;
  std::vector<std::array<Matrix, 4>> j_;
  std::vector<std::array<double, 4>> psi_norm_;
  std::optional<LinOp> H_fr_;
  std::optional<LinOp> H_int_;
  std::optional<LinOp> eta_;
  double M_el_ = 0.0;
  double M_ph_ = 0.0;
};

QedModel build_model(const QedConfig& cfg);

// T^dagger = eta T* eta
LinOp eta_adjoint(const QedModel& model, const LinOp& T);

Report field_commutators(const QedModel& model, std::uint64_t seed = 5);

// Lemma-type photon estimate ||a_mu(f) Psi|| <= ||f|| ||N_b^{1/2} Psi|| on random Psi (ratio report).
Report annihilator_estimate(const QedModel& model, std::uint64_t seed = 6, int samples = 50);

// ||H_int (N_b + 1)^{-1/2}|| against |e| ||chi_sp||_1 M_el M_ph (ratio report).
Report interaction_relative_bound(const QedModel& model);

// Grade shift, eta-symmetry, current hermiticity, field norm bounds.
std::vector<Report> structure_reports(const QedModel& model);

// max |<W Psi, eta W Phi> - <Psi, eta Phi>| over random pairs, plus the dagger-inverse residual
// ||eta W* eta W Psi - Psi|| and top-sector leakage from photon-vacuum states.
Report eta_unitarity_check(const QedModel& model, double t, double tol, int pairs = 50, std::uint64_t seed = 8);

}  // namespace dysonprop
