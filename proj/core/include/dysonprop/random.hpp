#pragma once

#include <cstdint>
#include <random>

#include "dysonprop/graded.hpp"

namespace dysonprop {

using Rng = std::mt19937_64;

// Entries with independent standard normal real and imaginary parts.
Matrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector random_unit_vector(Rng& rng, Eigen::Index n);

}  // namespace dysonprop
