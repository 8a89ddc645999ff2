#pragma once

#include <vector>

#include <Eigen/Dense>

namespace dysonprop {

struct GaussRule {
  Eigen::VectorXd nodes;    // ascending on [-1, 1]
  Eigen::VectorXd weights;
};

GaussRule gauss_legendre(int m);

// S(j,k) = integral from -1 to nodes(j) of the k-th Lagrange basis polynomial
// through the rule's nodes. Applied to samples f(x_k) it integrates the
// interpolant from the left panel edge up to each node.
Eigen::MatrixXd integration_matrix(const GaussRule& rule);

// Lagrange basis values l_k(x) through the given nodes.
Eigen::VectorXd lagrange_basis(const Eigen::VectorXd& nodes, double x);

}  // namespace dysonprop
