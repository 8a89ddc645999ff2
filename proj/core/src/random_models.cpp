#include "dysonprop/random_models.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dysonprop/random.hpp"

namespace dysonprop {

RandomModel random_graded_model(std::uint64_t seed, int dim, int b, bool hermitian_h1, double coupling) {
  if (dim < 2) throw InputError("random_graded_model: dim must be >= 2");
  if (b < 1) throw InputError("random_graded_model: grade shift must be >= 1");
  Rng rng(seed);
  const int gmax = std::min(dim - 1, 2 * b + 3);
  std::uniform_int_distribution<int> ug(0, gmax);
  std::vector<double> grades(dim);
  for (auto& g : grades) g = ug(rng);
  grades[0] = 0;
  grades[1] = std::min(b, gmax);
  const SpacePtr space = make_space(grades);

  // Free part: Hermitian blocks inside each grade, spectrum in [-2, 2].
  Matrix h0 = Matrix::Zero(dim, dim);
  std::map<double, std::vector<int>> blocks;
  for (int j = 0; j < dim; ++j) blocks[grades[j]].push_back(j);
  for (const auto& [g, idx] : blocks) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix x = random_complex(rng, m, m);
    Matrix h = 0.5 * (x + x.adjoint());
    const double nrm = spectral_norm(h);
    if (nrm > 0) h *= 2.0 / nrm;
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index c = 0; c < m; ++c) h0(idx[a], idx[c]) = h(a, c);
  }

  Matrix x = random_complex(rng, dim, dim);
  Matrix h1 = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < dim; ++j) {
      const double shift = grades[j] - grades[k];
      const bool allowed = hermitian_h1 ? std::abs(shift) <= b : shift <= b;
      if (allowed) h1(j, k) = x(j, k);
    }
  if (hermitian_h1) h1 = (0.5 * (h1 + h1.adjoint())).eval();
  LinOp H1(space, h1);
  H1 = LinOp(space, h1 * (coupling / relative_bound_constant(H1)));
  H1 = H1.certified();
  LinOp H0(space, h0);
  return {H0, H1, b, hermitian_h1, seed};
}

std::vector<RandomModel> model_fleet(std::uint64_t seed, int count, HermitianPolicy policy, int min_dim,
                                     int max_dim) {
  std::vector<RandomModel> fleet;
  for (int i = 0; i < count; ++i) {
    const int dim = count == 1 ? min_dim
                               : min_dim + static_cast<int>(std::lround(double(max_dim - min_dim) * i / (count - 1)));
    const int b = 1 + i % 3;
    const bool herm = policy == HermitianPolicy::All || (policy == HermitianPolicy::Alternate && i % 2 == 1);
    fleet.push_back(random_graded_model(seed * 1000003ULL + static_cast<std::uint64_t>(i), dim, b, herm));
  }
  return fleet;
}

}  // namespace dysonprop
