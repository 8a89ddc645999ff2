#pragma once

#include <cstdint>
#include <vector>

#include "dysonprop/graded.hpp"

namespace dysonprop {

struct RandomModel {
  LinOp H0;
  LinOp H1;
  int grade_shift = 1;
  bool hermitian = false;
  std::uint64_t seed = 0;
};

// Integer grades, H0 Hermitian and block diagonal in the grading, H1 supported on entries
// raising the grade by at most b and scaled to relative bound constant C = coupling.
RandomModel random_graded_model(std::uint64_t seed, int dim, int b, bool hermitian_h1, double coupling = 0.5);

enum class HermitianPolicy { None, Alternate, All };

// count models with dims spread over [min_dim, max_dim] and grade shifts cycling 1, 2, 3.
std::vector<RandomModel> model_fleet(std::uint64_t seed, int count, HermitianPolicy policy, int min_dim = 4,
                                     int max_dim = 64);

}  // namespace dysonprop
