#include "dysonprop/random.hpp"

namespace dysonprop {

Matrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < cols; ++k)
    for (Eigen::Index j = 0; j < rows; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(j, k) = cplx(re, im);
    }
  return m;
}

Vector random_unit_vector(Rng& rng, Eigen::Index n) {
  Vector v = random_complex(rng, n, 1).col(0);
  return v / v.norm();
}

}  // namespace dysonprop
