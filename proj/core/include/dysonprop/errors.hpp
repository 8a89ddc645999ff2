#pragma once

#include <stdexcept>
#include <string>

namespace dysonprop {

// Named model assumptions. Error messages carry the identifier string.
enum class Assumption {
  GradingNonNegative,
  FreeHamiltonianHermitian,
  GradingCommutesWithFree,
  InteractionGradeShift,
  InteractionRelativeBound,
  AdjointGradeShift,
  ObservableGradeShift,
};

const char* assumption_name(Assumption a);

// Malformed input: dimension mismatch, bad schema, invalid parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Momentum outside the polarization frame domain, etc.
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class AssumptionViolation : public std::runtime_error {
 public:
  AssumptionViolation(Assumption which, const std::string& detail);
  Assumption which() const { return which_; }

 private:
  Assumption which_;
};

class TruncationError : public std::runtime_error {
 public:
  TruncationError(int max_order, double tail_bound, double tol);
  int max_order() const { return max_order_; }
  double tail_bound() const { return tail_bound_; }

 private:
  int max_order_;
  double tail_bound_;
};

class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(double t_reached, double dt_last, const std::string& detail);
  double t_reached() const { return t_reached_; }
  double dt_last() const { return dt_last_; }

 private:
  double t_reached_;
  double dt_last_;
};

}  // namespace dysonprop
