#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "dysonprop/graded.hpp"
#include "dysonprop/quadrature.hpp"

namespace dysonprop {

// Composite Gauss-Legendre grid on [t_start, t_end] (signed orientation).
// Nodes: t_start, then per panel its Gauss nodes followed by the right edge.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int panels = 1;
  int nodes_per_panel = 8;

  void validate() const;
  std::size_t node_count() const { return 1 + static_cast<std::size_t>(panels) * (nodes_per_panel + 1); }
  std::size_t target_index() const { return node_count() - 1; }
  std::vector<double> node_times() const;
};

struct DysonTerm {
  int order = 0;
  std::vector<Vector> values;  // one per grid node
  double sup_norm() const;
};

struct SeriesResult {
  std::vector<DysonTerm> terms;  // empty unless terms were kept
  std::vector<double> per_order_sup_norms;
  std::vector<double> per_order_bounds;  // a-priori bound at |t_end - t_start|
  Vector partial_sum;
  int achieved_order = 0;
  double tail_bound = 0.0;
  double quadrature_estimate = 0.0;
  // Largest ratio ||U_n(tau,t')xi|| / apriori_bound(n, |tau-t'|, ...) over nodes and orders.
  double max_bound_ratio = 0.0;
  GradeCert cert;
  double L_xi = 0.0;
  double norm_xi = 0.0;
  TimeGrid grid;
};

// Block variant: U(t_end, t_start) applied to every column of X.
struct BlockResult {
  Matrix result;
  int achieved_order = 0;
  double tail_bound = 0.0;
  double max_bound_ratio = 0.0;
  double quadrature_estimate = 0.0;
  std::vector<double> per_order_sup_norms;  // max over columns and nodes
};

struct EngineOptions {
  int max_order = 64;
  int nodes_per_panel = 8;
  // Run at least this many orders (keeps finite-difference stencils on a common order).
  int min_order = 0;
  bool keep_terms = true;
  bool estimate_quadrature = true;
  // Extra cap on the panel width; 0 disables.
  double max_panel_width = 0.0;
};

double apriori_bound(int n, double dt, double C, double b, double L_xi, double norm_xi);

// Sum over n > N of apriori_bound, stopped when increments fall below 1e-3 of the running tail.
double apriori_tail(int N, double dt, double C, double b, double L_xi, double norm_xi);

// Smallest N <= max_order with apriori_tail(N) < tol; throws TruncationError otherwise.
int required_order(double dt, const GradeCert& cert, double L_xi, double norm_xi, double tol, int max_order,
                   double* tail = nullptr);

LinOp interaction_picture(const LinOp& H0, const LinOp& H1, double tau);

DysonTerm dyson_step(const DysonTerm& prev, const LinOp& H0, const LinOp& H1, const TimeGrid& grid,
                     double t_prime);

// Panel width <= 0.1 / (C sqrt(min(L + N b, max grade) + 1)) and <= 1 / (spread of H0 spectrum).
TimeGrid suggest_grid(const GradeCert& cert, double free_spread, double max_grade, double L_xi, double norm_xi,
                      double t_start, double t_end, double tol, const EngineOptions& opts = {});

class DysonEngine {
 public:
  DysonEngine(const LinOp& H0, const LinOp& H1, EngineOptions opts = {});
  ~DysonEngine();
  DysonEngine(DysonEngine&&) noexcept;
  DysonEngine& operator=(DysonEngine&&) noexcept;

  const LinOp& H0() const;
  const LinOp& H1() const;
  const GradeCert& cert() const;
  const GradeCert& adjoint_cert() const;
  const EngineOptions& options() const;
  const SpacePtr& space() const;
  double free_spread() const;

  TimeGrid grid_for(double L_xi, double norm_xi, double t_start, double t_end, double tol,
                    bool adjoint = false) const;

  // U(grid.t_end, grid.t_start) xi.
  SeriesResult evolve(const Vector& xi, const TimeGrid& grid, double tol) const;
  // U(grid.t_end, grid.t_start)^* xi.
  SeriesResult evolve_adjoint(const Vector& xi, const TimeGrid& grid, double tol) const;

  BlockResult evolve_block(const Matrix& X, const TimeGrid& grid, double tol) const;
  BlockResult evolve_block_adjoint(const Matrix& X, const TimeGrid& grid, double tol) const;
  // Explicit grid and a floor on the number of orders; returns only the target values.
  Matrix evolve_fixed(const Matrix& X, const TimeGrid& grid, double tol, int min_order, bool adjoint = false) const;

  // Automatic grid versions.
  Vector apply(double t, double t_prime, const Vector& xi, double tol) const;
  Vector apply_adjoint(double t, double t_prime, const Vector& xi, double tol) const;
  Matrix apply_block(double t, double t_prime, const Matrix& X, double tol) const;
  Matrix apply_block_adjoint(double t, double t_prime, const Matrix& X, double tol) const;
  Matrix propagator(double t, double t_prime, double tol) const;

  // e^{-i t H0} and its action.
  Matrix free_evolution(double t) const;
  Matrix free_evolution(double t, const Matrix& X) const;
  // H1(tau) in the original basis.
  Matrix interaction_at(double tau) const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

SeriesResult evolve_vector(const LinOp& H0, const LinOp& H1, const Vector& xi, const TimeGrid& grid, double tol,
                           const EngineOptions& opts = {});
SeriesResult evolve_adjoint(const LinOp& H0, const LinOp& H1, const Vector& xi, const TimeGrid& grid, double tol,
                            const EngineOptions& opts = {});

}  // namespace dysonprop
