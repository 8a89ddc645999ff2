#include <gtest/gtest.h>

#include <cmath>

#include "dysonprop/quadrature.hpp"

using namespace dysonprop;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int m : {1, 2, 4, 8, 12}) {
    const GaussRule r = gauss_legendre(m);
    ASSERT_EQ(r.nodes.size(), m);
    for (int d = 0; d <= 2 * m - 1; ++d) {
      double q = 0.0;
      for (int k = 0; k < m; ++k) q += r.weights(k) * std::pow(r.nodes(k), d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      EXPECT_NEAR(q, exact, 1e-14) << "m=" << m << " d=" << d;
    }
  }
}

TEST(GaussLegendre, NodesAscendingInside) {
  const GaussRule r = gauss_legendre(8);
  for (int k = 0; k < 8; ++k) {
    EXPECT_GT(r.nodes(k), -1.0);
    EXPECT_LT(r.nodes(k), 1.0);
    if (k) EXPECT_GT(r.nodes(k), r.nodes(k - 1));
  }
  EXPECT_NEAR(r.weights.sum(), 2.0, 1e-15);
}

TEST(GaussLegendre, RejectsNonPositive) { EXPECT_ANY_THROW(gauss_legendre(0)); }

TEST(IntegrationMatrix, AntiderivativeOfPolynomials) {
  const GaussRule r = gauss_legendre(8);
  const Eigen::MatrixXd S = integration_matrix(r);
  for (int d = 0; d < 8; ++d) {
    Eigen::VectorXd f(8);
    for (int k = 0; k < 8; ++k) f(k) = std::pow(r.nodes(k), d);
    const Eigen::VectorXd F = S * f;
    for (int j = 0; j < 8; ++j) {
      const double exact = (std::pow(r.nodes(j), d + 1) - std::pow(-1.0, d + 1)) / (d + 1);
      EXPECT_NEAR(F(j), exact, 1e-14);
    }
  }
}

TEST(LagrangeBasis, PartitionOfUnityAndInterpolation) {
  const GaussRule r = gauss_legendre(6);
  EXPECT_NEAR(lagrange_basis(r.nodes, 0.3).sum(), 1.0, 1e-14);
  const Eigen::VectorXd l = lagrange_basis(r.nodes, r.nodes(2));
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(l(k), k == 2 ? 1.0 : 0.0, 1e-14);
}
