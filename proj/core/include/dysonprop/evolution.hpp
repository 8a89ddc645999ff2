#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dysonprop/dyson.hpp"

namespace dysonprop {

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> residuals;  // Schroedinger defect norms
};

struct ObservableTrack {
  std::vector<double> times;
  std::vector<LinOp> matrices;
  LinOp source;
};

enum class HeisenbergMode { Weak, Strong };

inline constexpr double kDefaultStep = 1e-3;

// W(t) = e^{-itH0} U(t,0).
LinOp propagator_W(const LinOp& H0, const LinOp& H1, double t, double tol);
Matrix propagator_W(const DysonEngine& engine, double t, double tol);
Matrix apply_W(const DysonEngine& engine, double t, const Matrix& X, double tol);

// Evaluates W(s) X for each s on grids sharing one panel count and one series order,
// so differences across the stencil are free of truncation jitter.
std::vector<Matrix> apply_W_stencil(const DysonEngine& engine, const std::vector<double>& ts, const Matrix& X,
                                    double tol);

Trajectory schrodinger_trajectory(const LinOp& H0, const LinOp& H1, const Vector& xi, const std::vector<double>& times,
                                  double tol, double h = kDefaultStep);
Trajectory schrodinger_trajectory(const DysonEngine& engine, const Vector& xi, const std::vector<double>& times,
                                  double tol, double h = kDefaultStep);

// || (W(t+h)xi - W(t-h)xi) / 2h + i H W(t) xi ||
double schrodinger_residual(const DysonEngine& engine, const Vector& xi, double t, double h, double tol);

// Finite differences of U(t,t') xi in t (DE1) and in t' (DE2).
double forward_equation_residual(const DysonEngine& engine, const Vector& xi, double t, double t_prime, double h,
                                 double tol);
double backward_equation_residual(const DysonEngine& engine, const Vector& xi, double t, double t_prime, double h,
                                  double tol);

// Checks B and B* against the declared grade shift b0 when one is given.
ObservableTrack heisenberg_track(const LinOp& H0, const LinOp& H1, const LinOp& B, const std::vector<double>& times,
                                 double tol, std::optional<double> b0 = std::nullopt);
ObservableTrack heisenberg_track(const DysonEngine& engine, const LinOp& B, const std::vector<double>& times,
                                 double tol, std::optional<double> b0 = std::nullopt);

// Residuals at the interior times of a uniformly sampled track.
std::vector<double> heisenberg_residuals(const ObservableTrack& track, const LinOp& H, HeisenbergMode mode,
                                         std::uint64_t seed = 20240611, int pairs = 20);

// || split-form right-hand side - [iH, B(t)] || with U(0,t) computed by its own series run.
double split_form_residual(const DysonEngine& engine, const LinOp& B, double t, double tol);

// Vector form of the strong equation: || (B(t+h) - B(t-h)) xi / 2h - [iH, B(t)] xi || per column of Xi.
std::vector<double> heisenberg_vector_residuals(const DysonEngine& engine, const Matrix& B, double t, double h,
                                                const Matrix& Xi, double tol);

void require_observable_shift(const LinOp& B, double b0);

}  // namespace dysonprop
