#include <gtest/gtest.h>

#include <cmath>

#include "dysonprop/fock.hpp"
#include "test_util.hpp"

using namespace dysonprop;
using dysonprop::testing::max_abs;

namespace {

FockBasis single_boson(int cutoff, double energy = 1.0) {
  ModeSpec s;
  s.bosons.push_back({"a", energy, cutoff});
  return FockBasis(s);
}

FockBasis fermions(int count) {
  ModeSpec s;
  for (int k = 0; k < count; ++k) s.fermions.push_back({"f" + std::to_string(k), 1.0 + k});
  return FockBasis(s);
}

}  // namespace

TEST(FockBasis, OccupationOrderAndGrades) {
  ModeSpec s;
  s.bosons.push_back({"a", 1.0, 2});
  s.fermions.push_back({"f", 1.0});
  const FockBasis b(s);
  ASSERT_EQ(b.dim(), 6u);
  EXPECT_EQ(b.states()[0], (std::vector<int>{0, 0}));
  EXPECT_EQ(b.states()[1], (std::vector<int>{0, 1}));
  EXPECT_EQ(b.states()[5], (std::vector<int>{2, 1}));
  EXPECT_EQ(b.space()->grades(), (std::vector<double>{0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(b.index_of({1, 1}), std::optional<std::size_t>(3));
  EXPECT_FALSE(b.index_of({3, 0}).has_value());
}

TEST(FockBasis, TotalBosonCap) {
  ModeSpec s;
  for (int k = 0; k < 3; ++k) s.bosons.push_back({"a" + std::to_string(k), 1.0, 3});
  s.boson_cap = 3;
  const FockBasis b(s);
  EXPECT_EQ(b.dim(), 20u);  // C(6,3)
  EXPECT_EQ(b.max_boson_number(), 3);
}

TEST(FockBasis, Validation) {
  ModeSpec s;
  s.bosons.push_back({"a", 1.0, 0});
  EXPECT_THROW(FockBasis{s}, InputError);
  ModeSpec dup;
  dup.bosons.push_back({"a", 1.0, 1});
  dup.fermions.push_back({"a", 1.0});
  EXPECT_THROW(FockBasis{dup}, InputError);
  const FockBasis b = single_boson(2);
  EXPECT_THROW(b.mode_position("zz"), InputError);
  EXPECT_THROW(fermion_ops(b, "a"), InputError);
}

TEST(BosonOps, CutoffTwoMatrix) {
  const LadderPair p = boson_ops(single_boson(2), "a");
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 1) = 1.0;
  expected(1, 2) = std::sqrt(2.0);
  EXPECT_EQ(p.annihilator.matrix(), expected);
  EXPECT_EQ(p.creator.matrix(), expected.adjoint());
}

TEST(BosonOps, CommutatorDefectAtTopSector) {
  const int cutoff = 4;
  const FockBasis b = single_boson(cutoff);
  const LadderPair p = boson_ops(b, "a");
  const Matrix& a = p.annihilator.matrix();
  const Matrix& ad = p.creator.matrix();
  Matrix expected = Matrix::Identity(cutoff + 1, cutoff + 1);
  expected(cutoff, cutoff) -= cutoff + 1.0;
  EXPECT_LT(max_abs(a * ad - ad * a - expected), 1e-13);
  const Matrix P = below_cap_projector(b).matrix();
  EXPECT_LT(max_abs((a * ad - ad * a) * P - P), 1e-13);
}

TEST(BosonOps, CreatorRaisesByOne) { EXPECT_EQ(grade_shift_bound(boson_ops(single_boson(3), "a").creator), 1.0); }

TEST(FermionOps, SingleMode) {
  const LadderPair p = fermion_ops(fermions(1), "f0");
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 1) = 1.0;
  EXPECT_EQ(p.annihilator.matrix(), expected);
}

TEST(FermionOps, CanonicalAnticommutation) {
  const FockBasis b = fermions(3);
  std::vector<LadderPair> ops;
  for (int k = 0; k < 3; ++k) ops.push_back(fermion_ops(b, "f" + std::to_string(k)));
  const Matrix I = Matrix::Identity(8, 8);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Matrix& bi = ops[i].annihilator.matrix();
      const Matrix& bj = ops[j].annihilator.matrix();
      const Matrix& bjd = ops[j].creator.matrix();
      const Matrix car = bi * bjd + bjd * bi - (i == j ? I : Matrix::Zero(8, 8));
      EXPECT_EQ(max_abs(car), 0.0);
      EXPECT_EQ(max_abs(bi * bj + bj * bi), 0.0);
    }
}

TEST(FermionOps, CreatorHasUnitNorm) {
  const FockBasis b = fermions(2);
  EXPECT_NEAR(spectral_norm(fermion_ops(b, "f1").creator.matrix()), 1.0, 1e-15);
}

TEST(SecondQuantize, ZeroEnergies) {
  const FockBasis b = single_boson(3, 0.0);
  EXPECT_EQ(max_abs(second_quantize(b).matrix()), 0.0);
}

TEST(SecondQuantize, Additive) {
  ModeSpec s;
  s.bosons.push_back({"a", 0.7, 3});
  s.fermions.push_back({"f", 1.9});
  const FockBasis b(s);
  const Matrix H = second_quantize(b).matrix();
  EXPECT_DOUBLE_EQ(H(*b.index_of({2, 0}), *b.index_of({2, 0})).real(), 1.4);
  EXPECT_DOUBLE_EQ(H(*b.index_of({2, 1}), *b.index_of({2, 1})).real(), 1.4 + 1.9);
  EXPECT_THROW(second_quantize(b, {1.0}), InputError);
}

TEST(SecondQuantize, NumberOperatorIsGrade) {
  ModeSpec s;
  s.bosons.push_back({"a", 0.3, 2});
  s.bosons.push_back({"c", 0.4, 2});
  s.fermions.push_back({"f", 2.0});
  const FockBasis b(s);
  const Matrix N = boson_number_operator(b).matrix();
  EXPECT_EQ(N, second_quantize(b, {1.0, 1.0, 0.0}).matrix());
  for (std::size_t j = 0; j < b.dim(); ++j)
    EXPECT_EQ(N(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real(), b.space()->grade(j));
}

TEST(EtaMetric, NoScalarModesIsIdentity) {
  const FockBasis b = single_boson(3);
  EXPECT_EQ(eta_metric(b).matrix(), Matrix::Identity(4, 4));
}

TEST(EtaMetric, ScalarParity) {
  ModeSpec s;
  s.bosons.push_back({"s", 1.0, 2});
  s.bosons.push_back({"t", 1.0, 1});
  s.scalar_modes = {"s"};
  const FockBasis b(s);
  const Matrix eta = eta_metric(b).matrix();
  for (std::size_t j = 0; j < b.dim(); ++j) {
    const int n0 = b.states()[j][0];
    const auto jj = static_cast<Eigen::Index>(j);
    EXPECT_EQ(eta(jj, jj).real(), n0 % 2 ? -1.0 : 1.0);
  }
  EXPECT_EQ(eta * eta, Matrix::Identity(static_cast<Eigen::Index>(b.dim()), static_cast<Eigen::Index>(b.dim())));
}

TEST(Projectors, TopSector) {
  ModeSpec s;
  s.bosons.push_back({"a", 1.0, 2});
  s.bosons.push_back({"c", 1.0, 2});
  s.boson_cap = 2;
  const FockBasis b(s);
  const Matrix P = top_sector_projector(b).matrix();
  EXPECT_EQ(P.trace().real(), 3.0);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(b.dim()));
  v(0) = 1.0;
  EXPECT_EQ(top_sector_fraction(b, v), 0.0);
  v(static_cast<Eigen::Index>(*b.index_of({1, 1}))) = 1.0;
  EXPECT_NEAR(top_sector_fraction(b, v), std::sqrt(0.5), 1e-15);
}
