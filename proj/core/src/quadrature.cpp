#include "dysonprop/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "dysonprop/errors.hpp"

namespace dysonprop {

GaussRule gauss_legendre(int m) {
  if (m < 1) throw InputError("gauss_legendre: need at least one node");
  GaussRule r{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i) {
    // Newton on P_m from the Chebyshev-like initial guess.
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    r.nodes(i) = x;
    r.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Eigen::VectorXd lagrange_basis(const Eigen::VectorXd& nodes, double x) {
  const auto m = nodes.size();
  Eigen::VectorXd l = Eigen::VectorXd::Ones(m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index q = 0; q < m; ++q)
      if (q != k) l(k) *= (x - nodes(q)) / (nodes(k) - nodes(q));
  return l;
}

Eigen::MatrixXd integration_matrix(const GaussRule& rule) {
  const auto m = rule.nodes.size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
  // m-point Gauss is exact for the degree m-1 basis polynomials.
  for (Eigen::Index j = 0; j < m; ++j) {
    const double half = 0.5 * (rule.nodes(j) + 1.0);
    for (Eigen::Index q = 0; q < m; ++q) {
      const double s = -1.0 + half * (rule.nodes(q) + 1.0);
      S.row(j) += half * rule.weights(q) * lagrange_basis(rule.nodes, s).transpose();
    }
  }
  return S;
}

}  // namespace dysonprop
