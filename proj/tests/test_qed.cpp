#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dysonprop/qed.hpp"
#include "dysonprop/random.hpp"
#include "test_util.hpp"

using namespace dysonprop;
using dysonprop::testing::max_abs;

namespace {

const QedModel& toy() {
  static const QedModel model(default_toy_config());
  return model;
}

Vec3 random_momentum(Rng& rng) {
  std::normal_distribution<double> nd;
  return Vec3(nd(rng), nd(rng), nd(rng));
}

QedConfig two_photon_config() {
  QedConfig c = default_toy_config();
  c.momentum_points = {Vec3(0.6, 0.0, 0.8), Vec3(0.0, 0.9, -0.3)};
  c.momentum_weights = {1.0, 0.5};
  c.photon_cap = 2;
  return c;
}

}  // namespace

TEST(Gamma, CliffordRelations) {
  const auto g = gamma_matrices();
  const Eigen::Matrix4d eta = minkowski_metric();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      EXPECT_EQ(max_abs(g[mu] * g[nu] + g[nu] * g[mu] - 2.0 * eta(mu, nu) * Mat4::Identity()), 0.0);
  EXPECT_EQ(max_abs(g[0] * g[0] - Mat4::Identity()), 0.0);
  EXPECT_EQ(max_abs(g[1] * g[2] + g[2] * g[1]), 0.0);
  EXPECT_EQ(max_abs(g[1] * g[1] + Mat4::Identity()), 0.0);
}

TEST(Gamma, AlphaBetaAndSpin) {
  const auto g = gamma_matrices();
  const auto a = alpha_matrices();
  EXPECT_EQ(max_abs(beta_matrix() - g[0]), 0.0);
  for (int mu = 0; mu < 4; ++mu) {
    EXPECT_EQ(max_abs(a[mu] - g[0] * g[mu]), 0.0);
    EXPECT_EQ(max_abs(a[mu] - a[mu].adjoint()), 0.0);
  }
  const auto s = spin_matrices();
  const cplx i{0.0, 1.0};
  // [s_1, s_2] = i s_3
  EXPECT_LT(max_abs(s[0] * s[1] - s[1] * s[0] - i * s[2]), 1e-15);
  EXPECT_LT(max_abs(s[2] - 0.5 * Mat4(Eigen::Vector4cd(1, -1, 1, -1).asDiagonal())), 1e-15);
}

TEST(Spinors, RestFrame) {
  const double M = 2.25;
  const DiracSpinors s = dirac_spinors(Vec3::Zero(), M);
  Vec4 expected = Vec4::Zero();
  expected(0) = std::sqrt(M);
  EXPECT_LT((s.u_up - expected).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(s.energy, M);
}

TEST(Spinors, NormalisationOrthogonalityCompleteness) {
  Rng rng(21);
  for (int k = 0; k < 20; ++k) {
    const Vec3 p = random_momentum(rng);
    const DiracSpinors s = dirac_spinors(p, 1.3);
    EXPECT_NEAR(s.energy, std::sqrt(p.squaredNorm() + 1.69), 1e-14);
    Mat4 sum = Mat4::Zero();
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(s.u(a).squaredNorm(), s.energy, 1e-12);
      EXPECT_NEAR(s.v(a).squaredNorm(), s.energy, 1e-12);
      for (int b = 0; b < 2; ++b) EXPECT_LT(std::abs(s.u(a).dot(s.v(b))), 1e-13);
      sum += s.u(a) * s.u(a).adjoint() + s.v(a) * s.v(a).adjoint();
    }
    EXPECT_LT(max_abs(sum - s.energy * Mat4::Identity()), 1e-12);
  }
}

TEST(Spinors, SolveFreeDiracEquation) {
  Rng rng(22);
  const auto a = alpha_matrices();
  const double M = 0.8;
  const Vec3 p = random_momentum(rng);
  const DiracSpinors s = dirac_spinors(p, M);
  // h(p) = alpha . p + beta M; u has eigenvalue E, v(-p) pairs with -E.
  Mat4 h = M * beta_matrix();
  for (int j = 0; j < 3; ++j) h += p(j) * a[j + 1];
  for (int q = 0; q < 2; ++q) {
    EXPECT_LT((h * s.u(q) - s.energy * s.u(q)).norm(), 1e-12);
    EXPECT_LT((h * s.v(q) + s.energy * s.v(q)).norm(), 1e-12);
  }
}

TEST(Spinors, RejectsBadMass) { EXPECT_THROW(dirac_spinors(Vec3::Zero(), 0.0), DomainError); }

TEST(Polarization, AxisAlignedMomentum) {
  const auto e = polarization_vectors(Vec3(1, 0, 0));
  EXPECT_EQ(e[0], Eigen::Vector4d(1, 0, 0, 0));
  EXPECT_EQ(e[3], Eigen::Vector4d(0, 1, 0, 0));
  EXPECT_EQ(e[1], Eigen::Vector4d(0, 0, 1, 0));
  EXPECT_EQ(e[2], Eigen::Vector4d(0, 0, 0, 1));
  const Eigen::Matrix4d g = minkowski_metric();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
  for (int l = 0; l < 4; ++l) sum += g(l, l) * e[l] * e[l].transpose();
  EXPECT_EQ(sum, g);
}

TEST(Polarization, TransverseOrthonormalComplete) {
  Rng rng(23);
  const Eigen::Matrix4d g = minkowski_metric();
  for (int n = 0; n < 20; ++n) {
    const Vec3 k = random_momentum(rng);
    const auto e = polarization_vectors(k);
    for (int r = 1; r <= 2; ++r) EXPECT_LT(std::abs(e[r].tail<3>().dot(k)), 1e-14);
    for (int r = 1; r <= 3; ++r)
      for (int s = 1; s <= 3; ++s) EXPECT_NEAR(e[r].tail<3>().dot(e[s].tail<3>()), r == s ? 1.0 : 0.0, 1e-15);
    Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
    for (int l = 0; l < 4; ++l) sum += g(l, l) * e[l] * e[l].transpose();
    EXPECT_LT((sum - g).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Polarization, ZAxisOutsideDomain) {
  EXPECT_THROW(polarization_vectors(Vec3(0, 0, 2)), DomainError);
  EXPECT_THROW(polarization_vectors(Vec3::Zero()), DomainError);
}

TEST(QedConfig, DefaultsValidateAndReject) {
  EXPECT_NO_THROW(default_toy_config().validate());
  QedConfig c = default_toy_config();
  c.momentum_points[0] = Vec3(0, 0, 1);
  EXPECT_THROW(c.validate(), DomainError);
  c = default_toy_config();
  c.chi_sp.pop_back();
  EXPECT_THROW(c.validate(), InputError);
  c = default_toy_config();
  c.photon_cap = 0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(LatticeFourier, DirectSum) {
  const QedConfig c = default_toy_config();
  const Vec3 k(0.4, -0.1, 0.3);
  cplx s = 0.0;
  for (std::size_t y = 0; y < c.positions.size(); ++y)
    s += c.position_weights[y] * c.chi_ph[y] * std::exp(cplx(0.0, -k.dot(c.positions[y])));
  EXPECT_LT(std::abs(lattice_fourier(c, c.chi_ph, k) - s / std::pow(2.0 * std::numbers::pi, 1.5)), 1e-16);
}

TEST(QedModel, ToyDimensions) {
  const QedModel& m = toy();
  EXPECT_EQ(m.photon_basis().dim(), 35u);
  EXPECT_EQ(m.fermion_basis().dim(), 16u);
  EXPECT_EQ(m.basis().dim(), 560u);
  EXPECT_EQ(m.basis().max_boson_number(), 3);
}

TEST(QedModel, ZeroCouplingIsFree) {
  QedConfig c = default_toy_config();
  c.coupling = 0.0;
  const QedModel m(c);
  EXPECT_EQ(max_abs(m.H_int().matrix()), 0.0);
}

TEST(QedModel, InteractionStructure) {
  const QedModel& m = toy();
  EXPECT_EQ(grade_shift_bound(m.H_int()), 1.0);
  EXPECT_EQ(grade_shift_bound(m.H_int().adjoint()), 1.0);
  const Matrix& H = m.H_int().matrix();
  const Matrix& eta = m.eta().matrix();
  EXPECT_LE(spectral_norm(eta * H * eta - H.adjoint()), 1e-12);
  EXPECT_EQ(max_abs(eta * m.H_fr().matrix() * eta - m.H_fr().matrix()), 0.0);
  EXPECT_GT(spectral_norm(H), 0.0);
}

TEST(QedModel, EtaAdjointOfIdentity) {
  const QedModel& m = toy();
  const auto n = static_cast<Eigen::Index>(m.basis().dim());
  const LinOp I(m.basis().space(), Matrix::Identity(n, n));
  EXPECT_EQ(eta_adjoint(m, I).matrix(), Matrix::Identity(n, n));
}

TEST(QedModel, EtaAdjointSignsByPolarization) {
  const QedModel& m = toy();
  for (int lambda = 0; lambda < 4; ++lambda) {
    const LinOp a(m.basis().space(), m.lift_photon(m.photon_annihilator(0, lambda)));
    const Matrix dagger = eta_adjoint(m, a).matrix();
    const Matrix star = a.matrix().adjoint();
    if (lambda == 0)
      EXPECT_EQ(max_abs(dagger + star), 0.0);
    else
      EXPECT_EQ(max_abs(dagger - star), 0.0);
  }
}

TEST(QedModel, SmearedPhotonCommutators) {
  const QedModel m(two_photon_config());
  const Matrix P = below_cap_projector(m.photon_basis()).matrix();
  const Eigen::Matrix4d g = minkowski_metric();
  Vector f = Vector::Zero(2), h = Vector::Zero(2);
  f(0) = 1.0 / std::sqrt(1.0);
  h(1) = 1.0 / std::sqrt(0.5);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      // Disjoint support on the momentum grid; the total cap only spoils the top sector.
      const Matrix c = m.a_mu(f, mu) * m.a_mu_dagger(h, nu) - m.a_mu_dagger(h, nu) * m.a_mu(f, mu);
      EXPECT_EQ(max_abs(c * P), 0.0);
      const Matrix d = m.a_mu(f, mu) * m.a_mu_dagger(f, nu) - m.a_mu_dagger(f, nu) * m.a_mu(f, mu);
      const double expected = -g(mu, nu) * m.photon_inner(f, f);
      EXPECT_LT(max_abs(d * P - expected * P), 1e-14) << mu << nu;
    }
  EXPECT_NEAR(m.photon_inner(f, f), 1.0, 1e-15);
}

TEST(QedModel, FieldCommutatorReport) {
  const Report r = field_commutators(toy());
  EXPECT_TRUE(r.passed) << r.residual;
  EXPECT_LE(r.residual, 1e-14);
  EXPECT_EQ(r.context["car"].get<double>(), 0.0);
}

TEST(QedModel, DiracFieldNormIsOneParticleNorm) {
  const QedModel& m = toy();
  for (std::size_t x = 0; x < m.config().positions.size(); ++x)
    for (int l = 0; l < 4; ++l)
      EXPECT_NEAR(spectral_norm(m.field_psi(x, l)), m.psi_one_particle_norm(x, l), 1e-13);
}

TEST(QedModel, CurrentsAreHermitian) {
  const QedModel& m = toy();
  for (std::size_t x = 0; x < m.config().positions.size(); ++x)
    for (int mu = 0; mu < 4; ++mu) EXPECT_LT(max_abs(m.current(x, mu) - m.current(x, mu).adjoint()), 1e-12);
}

TEST(QedModel, RelativeBoundEstimates) {
  const Report r = interaction_relative_bound(toy());
  EXPECT_TRUE(r.passed) << r.residual;
  const Report a = annihilator_estimate(toy());
  EXPECT_TRUE(a.passed) << a.residual;
  for (const Report& s : structure_reports(toy())) EXPECT_TRUE(s.passed) << s.check_name << " " << s.residual;
}

TEST(EtaUnitarity, ZeroTime) {
  const Report r = eta_unitarity_check(toy(), 0.0, 1e-7);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(EtaUnitarity, FreeFieldExact) {
  QedConfig c = default_toy_config();
  c.coupling = 0.0;
  const Report r = eta_unitarity_check(QedModel(c), 0.5, 1e-7, 10);
  EXPECT_LE(r.residual, 1e-13);
}

TEST(EtaUnitarity, ToyModelHalfTime) {
  const Report r = eta_unitarity_check(toy(), 0.5, 1e-7, 20);
  EXPECT_TRUE(r.passed) << r.residual;
  EXPECT_LE(r.context["leakage"].get<double>(), 1e-6);
}
