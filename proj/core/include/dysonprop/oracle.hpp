#pragma once

#include <cstdint>
#include <vector>

#include "dysonprop/dyson.hpp"
#include "dysonprop/report.hpp"

namespace dysonprop {

// Scaling-and-squaring Pade exponential; throws std::overflow_error when the result is not finite.
Matrix matrix_exp(const Matrix& T);
LinOp matrix_exp(const LinOp& T);

// e^{itH0} e^{-i(t-t')(H0+H1)} e^{-it'H0}. For non-Hermitian H1 this rests on uniqueness of
// solutions of the interaction-picture ODE (a derived oracle).
LinOp oracle_propagator(const LinOp& H0, const LinOp& H1, double t, double t_prime);

// Adaptive Dormand-Prince integration of d/dt U(t,t')xi = -i H1(t) U(t,t')xi.
// Throws StiffnessError when the step size underflows.
Vector ode_oracle(const LinOp& H0, const LinOp& H1, const Vector& xi, double t, double t_prime, double tol);

struct SuiteParams {
  std::uint64_t seed = 11;
  int tuples = 10;
  int pairs = 20;
  int probe_vectors = 4;
  double time_range = 1.0;   // times drawn uniformly from [-time_range, time_range]
  double tol = 1e-7;         // cocycle, covariance, inverse
  double unitarity_tol = 1e-8;
  double duality_tol = 1e-9;
  double series_tol = 1e-10;
};

std::vector<Report> identity_suite(const LinOp& H0, const LinOp& H1, const SuiteParams& params = {});
std::vector<Report> identity_suite(const DysonEngine& engine, const SuiteParams& params = {});

struct ConvergenceTable {
  std::vector<double> alphas;
  int n_max = 0;
  // norms[n][a] = sup over nodes of ||K^alpha (phi_n - phi)||, n = 0..n_max
  std::vector<std::vector<double>> norms;
  std::vector<std::vector<double>> bounds;
  // Smallest n0 with the column strictly decreasing on n0..n_max-1; -1 if none.
  std::vector<int> onset;
  bool dominated = false;
  double worst_ratio = 0.0;  // max norm / bound
};

ConvergenceTable appendix_convergence(const LinOp& H0, const LinOp& H1, const Vector& xi, const TimeGrid& grid,
                                      const std::vector<double>& alphas, int n_max);

// Sum over k > n of (|I|^k / k!) C^k (L + k b + 1)^{alpha/2} prod_{j<k} (L + j b + 1)^{1/2} ||xi||.
double weighted_tail_bound(int n, double interval, const GradeCert& cert, double L_xi, double norm_xi,
                           double alpha);

}  // namespace dysonprop
