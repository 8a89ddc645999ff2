#include <gtest/gtest.h>

#include <cmath>

#include "dysonprop/oracle.hpp"
#include "dysonprop/qed.hpp"
#include "dysonprop/random.hpp"
#include "dysonprop/random_models.hpp"
#include "test_util.hpp"

using namespace dysonprop;
using dysonprop::testing::diag_op;
using dysonprop::testing::max_abs;

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

TEST(MatrixExp, Zero) { EXPECT_EQ(matrix_exp(Matrix::Zero(4, 4)), Matrix::Identity(4, 4)); }

TEST(MatrixExp, DiagonalPhases) {
  Eigen::Vector3d th(0.3, -1.2, 2.9);
  const Matrix T = Matrix((kI * th.cast<cplx>()).asDiagonal());
  const Matrix E = matrix_exp(T);
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(E(k, k) - std::exp(kI * th(k))), 1e-15);
  EXPECT_LT(max_abs(E - Matrix(E.diagonal().asDiagonal())), 1e-15);
}

TEST(MatrixExp, Nilpotent) {
  Matrix N = Matrix::Zero(3, 3);
  N(0, 2) = cplx(1.5, -0.5);
  N(1, 2) = 2.0;
  EXPECT_LT(max_abs(matrix_exp(N) - (Matrix::Identity(3, 3) + N)), 1e-15);
}

TEST(MatrixExp, Overflow) {
  Matrix T = Matrix::Zero(2, 2);
  T(0, 0) = 1e4;
  EXPECT_THROW(matrix_exp(T), std::overflow_error);
}

TEST(OraclePropagator, EqualTimes) {
  const RandomModel m = random_graded_model(1, 6, 1, false);
  EXPECT_LT(max_abs(oracle_propagator(m.H0, m.H1, 0.4, 0.4).matrix() - Matrix::Identity(6, 6)), 1e-14);
}

TEST(OraclePropagator, FreeCase) {
  const auto s = make_space({0, 1, 2});
  const Matrix U = oracle_propagator(diag_op(s, {1, 2, 3}), LinOp(s, Matrix::Zero(3, 3)), 0.9, -0.3).matrix();
  EXPECT_LT(max_abs(U - Matrix::Identity(3, 3)), 1e-14);
}

TEST(OraclePropagator, AgreesWithOdeOracle) {
  const RandomModel m = random_graded_model(2, 8, 2, false);
  Rng rng(2);
  const Vector xi = random_unit_vector(rng, 8);
  const Vector a = oracle_propagator(m.H0, m.H1, 0.8, -0.1).matrix() * xi;
  const Vector b = ode_oracle(m.H0, m.H1, xi, 0.8, -0.1, 1e-12);
  EXPECT_LT((a - b).norm(), 1e-9);
}

TEST(OdeOracle, ZeroInteraction) {
  const auto s = make_space({0, 1});
  const Vector xi = Vector::Ones(2);
  EXPECT_LT((ode_oracle(diag_op(s, {0, 1}), LinOp(s, Matrix::Zero(2, 2)), xi, 1.0, 0.0, 1e-10) - xi).norm(), 1e-14);
}

TEST(OdeOracle, TwoLevelFirstOrder) {
  // Weak coupling: the order-one closed form dominates.
  const double w = 1.7, g = 1e-6, t = 0.9;
  const auto s = make_space({0, 1});
  Matrix h1 = Matrix::Zero(2, 2);
  h1(1, 0) = g;
  Vector xi = Vector::Zero(2);
  xi(0) = 1.0;
  const Vector r = ode_oracle(diag_op(s, {0.0, w}), LinOp(s, h1), xi, t, 0.0, 1e-14);
  const cplx first = -g * (std::exp(kI * w * t) - 1.0) / w;
  EXPECT_LT(std::abs(r(1) - first), 1e-13);
  EXPECT_LT(std::abs(r(0) - 1.0), 1e-14);
}

TEST(OdeOracle, MatchesDysonEngineOnFleet) {
  for (const auto& m : model_fleet(3, 5, HermitianPolicy::Alternate, 4, 16)) {
    const DysonEngine e(m.H0, m.H1);
    Rng rng(m.seed);
    const Vector xi = random_unit_vector(rng, static_cast<Eigen::Index>(m.H0.dim()));
    EXPECT_LT((e.apply(1.0, 0.0, xi, 1e-10) - ode_oracle(m.H0, m.H1, xi, 1.0, 0.0, 1e-12)).norm(), 1e-8);
  }
}

TEST(IdentitySuite, FreeModelAllZero) {
  const auto s = make_space({0, 1, 1});
  SuiteParams p;
  p.tuples = 3;
  p.pairs = 4;
  for (const Report& r : identity_suite(diag_op(s, {0.5, 1, 2}), LinOp(s, Matrix::Zero(3, 3)), p)) {
    EXPECT_LE(r.residual, 1e-14) << r.check_name;
    EXPECT_TRUE(r.passed);
  }
}

TEST(IdentitySuite, HermitianIncludesUnitarity) {
  const RandomModel m = random_graded_model(4, 16, 1, true);
  SuiteParams p;
  p.tuples = 3;
  const auto rs = identity_suite(m.H0, m.H1, p);
  bool seen = false;
  for (const Report& r : rs) {
    EXPECT_TRUE(r.passed) << r.check_name << " " << r.residual;
    if (r.check_name == "unitarity") {
      seen = true;
      EXPECT_LE(r.residual, 1e-8);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(IdentitySuite, NonNormalSkipsUnitarity) {
  const RandomModel m = random_graded_model(5, 12, 2, false);
  SuiteParams p;
  p.tuples = 3;
  for (const Report& r : identity_suite(m.H0, m.H1, p)) {
    EXPECT_NE(r.check_name, "unitarity");
    EXPECT_TRUE(r.passed) << r.check_name << " " << r.residual;
    if (r.check_name == "cocycle") EXPECT_LE(r.residual, 1e-8);
  }
}

TEST(RandomModels, StructureAndDeterminism) {
  const RandomModel a = random_graded_model(6, 20, 2, false, 0.7);
  const RandomModel b = random_graded_model(6, 20, 2, false, 0.7);
  EXPECT_EQ(a.H1.matrix(), b.H1.matrix());
  EXPECT_LE(grade_shift_bound(a.H1), 2.0);
  EXPECT_NEAR(relative_bound_constant(a.H1), 0.7, 1e-12);
  EXPECT_NO_THROW(require_hermitian_free(a.H0));
  EXPECT_NO_THROW(require_free_commutes_with_grading(a.H0));
  const RandomModel h = random_graded_model(7, 10, 1, true);
  EXPECT_EQ(max_abs(h.H1.matrix() - h.H1.matrix().adjoint()), 0.0);
}

TEST(RandomModels, FleetPolicy) {
  const auto fleet = model_fleet(8, 6, HermitianPolicy::Alternate, 4, 20);
  ASSERT_EQ(fleet.size(), 6u);
  for (std::size_t k = 0; k < fleet.size(); ++k) {
    EXPECT_EQ(fleet[k].hermitian, k % 2 == 1);
    EXPECT_GE(fleet[k].H0.dim(), 4u);
    EXPECT_LE(fleet[k].H0.dim(), 20u);
  }
}

TEST(Convergence, FreeModelVanishesBeyondZero) {
  const auto s = make_space({0, 1, 2});
  Vector xi = Vector::Ones(3);
  const ConvergenceTable t =
      appendix_convergence(diag_op(s, {0, 1, 2}), LinOp(s, Matrix::Zero(3, 3)), xi, TimeGrid{0, 1, 2, 8}, {0, 1}, 5);
  for (const auto& row : t.norms)
    for (double v : row) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(t.onset, (std::vector<int>{-1, -1}));
}

TEST(Convergence, AlphaZeroMatchesAprioriTail) {
  const RandomModel m = random_graded_model(9, 10, 1, false);
  Vector xi = Vector::Zero(10);
  xi(0) = 1.0;
  const TimeGrid g{0.0, 1.0, 4, 8};
  const ConvergenceTable t = appendix_convergence(m.H0, m.H1, xi, g, {0.0}, 8);
  const GradeCert c = m.H1.certificate();
  for (int n = 0; n <= 8; ++n) EXPECT_NEAR(t.bounds[n][0], apriori_tail(n, 1.0, c.C, c.b, 0.0, 1.0), 1e-12);
  EXPECT_TRUE(t.dominated);
}

TEST(Convergence, ToyQedColumnsDecrease) {
  const QedModel model(default_toy_config());
  Vector xi = Vector::Zero(static_cast<Eigen::Index>(model.basis().dim()));
  xi(0) = 1.0;
  const ConvergenceTable t =
      appendix_convergence(model.H_fr(), model.H_int(), xi, TimeGrid{0.0, 1.0, 4, 8}, {0.0, 1.0, 2.0}, 12);
  EXPECT_TRUE(t.dominated);
  EXPECT_LE(t.worst_ratio, 1.001);
  for (std::size_t a = 0; a < 3; ++a) {
    ASSERT_GE(t.onset[a], 0);
    EXPECT_LE(t.onset[a], 3);
    for (int n = std::max(t.onset[a], 3); n < 12; ++n) EXPECT_LT(t.norms[n][a], t.norms[n - 1][a]);
  }
}

TEST(Convergence, Validation) {
  const auto s = make_space({0});
  EXPECT_THROW(appendix_convergence(diag_op(s, {0}), diag_op(s, {0}), Vector::Ones(1), TimeGrid{0, 1, 1, 8}, {0}, 1),
               InputError);
  EXPECT_THROW(appendix_convergence(diag_op(s, {0}), diag_op(s, {0}), Vector::Ones(1), TimeGrid{0, 1, 1, 8}, {-1}, 4),
               InputError);
}
