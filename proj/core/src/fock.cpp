#include "dysonprop/fock.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace dysonprop {

void ModeSpec::validate() const {
  std::set<std::string> seen;
  for (const auto& b : bosons) {
    if (!seen.insert(b.label).second) throw InputError("ModeSpec: duplicate label '" + b.label + "'");
    if (b.cutoff < 1) throw InputError("ModeSpec: cutoff of '" + b.label + "' must be >= 1");
    if (!(b.energy >= 0) || !std::isfinite(b.energy)) throw InputError("ModeSpec: bad energy for '" + b.label + "'");
  }
  for (const auto& f : fermions) {
    if (!seen.insert(f.label).second) throw InputError("ModeSpec: duplicate label '" + f.label + "'");
    if (!(f.energy >= 0) || !std::isfinite(f.energy)) throw InputError("ModeSpec: bad energy for '" + f.label + "'");
  }
  for (const auto& s : scalar_modes) {
    bool found = false;
    for (const auto& b : bosons) found = found || b.label == s;
    if (!found) throw InputError("ModeSpec: scalar mode '" + s + "' is not a boson mode");
  }
  if (boson_cap && *boson_cap < 0) throw InputError("ModeSpec: boson_cap must be >= 0");
  if (bosons.empty() && fermions.empty()) throw InputError("ModeSpec: no modes");
}

FockBasis::FockBasis(ModeSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t nb = spec_.bosons.size(), nf = spec_.fermions.size();
  const int cap = spec_.boson_cap.value_or(std::numeric_limits<int>::max());
  std::vector<std::vector<int>> boson_tuples;
  std::vector<int> occ(nb, 0);
  // Depth-first with ascending occupations yields lexicographic order.
  auto rec = [&](auto&& self, std::size_t i, int used) -> void {
    if (i == nb) {
      boson_tuples.push_back(occ);
      return;
    }
    for (int n = 0; n <= spec_.bosons[i].cutoff && used + n <= cap; ++n) {
      occ[i] = n;
      self(self, i + 1, used + n);
    }
    occ[i] = 0;
  };
  rec(rec, 0, 0);
  const std::size_t nferm_states = std::size_t{1} << nf;
  for (const auto& bt : boson_tuples) {
    int total = 0;
    for (int n : bt) total += n;
    max_bosons_ = std::max(max_bosons_, total);
    for (std::size_t f = 0; f < nferm_states; ++f) {
      std::vector<int> full = bt;
      for (std::size_t j = 0; j < nf; ++j) full.push_back(static_cast<int>((f >> (nf - 1 - j)) & 1u));
      index_[full] = states_.size();
      states_.push_back(std::move(full));
    }
  }
  std::vector<double> grades;
  grades.reserve(states_.size());
  for (std::size_t s = 0; s < states_.size(); ++s) grades.push_back(boson_number(s));
  space_ = make_space(std::move(grades));
}

std::optional<std::size_t> FockBasis::index_of(const std::vector<int>& occupation) const {
  auto it = index_.find(occupation);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FockBasis::mode_position(const std::string& label) const {
  for (std::size_t i = 0; i < spec_.bosons.size(); ++i)
    if (spec_.bosons[i].label == label) return i;
  for (std::size_t i = 0; i < spec_.fermions.size(); ++i)
    if (spec_.fermions[i].label == label) return spec_.bosons.size() + i;
  throw InputError("FockBasis: unknown mode '" + label + "'");
}

bool FockBasis::is_boson(const std::string& label) const { return mode_position(label) < spec_.bosons.size(); }

int FockBasis::boson_number(std::size_t state) const {
  int n = 0;
  for (std::size_t i = 0; i < spec_.bosons.size(); ++i) n += states_[state][i];
  return n;
}

LadderPair boson_ops(const FockBasis& basis, const std::string& mode) {
  const std::size_t pos = basis.mode_position(mode);
  if (!basis.is_boson(mode)) throw InputError("boson_ops: '" + mode + "' is a fermion mode");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const int occ = basis.states()[s][pos];
    if (occ == 0) continue;
    auto lowered = basis.states()[s];
    --lowered[pos];
    if (auto t = basis.index_of(lowered)) a(*t, s) = std::sqrt(static_cast<double>(occ));
  }
  LinOp ann(basis.space(), a);
  return {ann, ann.adjoint()};
}

LadderPair fermion_ops(const FockBasis& basis, const std::string& mode) {
  const std::size_t pos = basis.mode_position(mode);
  if (basis.is_boson(mode)) throw InputError("fermion_ops: '" + mode + "' is a boson mode");
  const std::size_t first = basis.spec().bosons.size();
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Matrix b = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto& occ = basis.states()[s];
    if (occ[pos] == 0) continue;
    int earlier = 0;
    for (std::size_t i = first; i < pos; ++i) earlier += occ[i];
    auto lowered = occ;
    lowered[pos] = 0;
    if (auto t = basis.index_of(lowered)) b(*t, s) = (earlier % 2 == 0) ? 1.0 : -1.0;
  }
  LinOp ann(basis.space(), b);
  return {ann, ann.adjoint()};
}

LinOp second_quantize(const FockBasis& basis, const std::vector<double>& energies) {
  if (energies.size() != basis.mode_count())
    throw InputError("second_quantize: expected " + std::to_string(basis.mode_count()) + " energies");
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Matrix h = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) e += basis.states()[s][i] * energies[i];
    h(s, s) = e;
  }
  return LinOp(basis.space(), std::move(h));
}

LinOp second_quantize(const FockBasis& basis) {
  std::vector<double> e;
  for (const auto& b : basis.spec().bosons) e.push_back(b.energy);
  for (const auto& f : basis.spec().fermions) e.push_back(f.energy);
  return second_quantize(basis, e);
}

LinOp boson_number_operator(const FockBasis& basis) {
  std::vector<double> e(basis.mode_count(), 0.0);
  for (std::size_t i = 0; i < basis.spec().bosons.size(); ++i) e[i] = 1.0;
  return second_quantize(basis, e);
}

LinOp eta_metric(const FockBasis& basis, const std::vector<std::string>& scalar_modes) {
  std::vector<std::size_t> pos;
  for (const auto& l : scalar_modes) {
    if (!basis.is_boson(l)) throw InputError("eta_metric: scalar mode '" + l + "' is not a boson mode");
    pos.push_back(basis.mode_position(l));
  }
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Matrix eta = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    int occ = 0;
    for (auto p : pos) occ += basis.states()[s][p];
    eta(s, s) = (occ % 2 == 0) ? 1.0 : -1.0;
  }
  return LinOp(basis.space(), std::move(eta));
}

LinOp eta_metric(const FockBasis& basis) { return eta_metric(basis, basis.spec().scalar_modes); }

LinOp below_cap_projector(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  const auto& bos = basis.spec().bosons;
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    bool ok = !basis.spec().boson_cap || basis.boson_number(s) < *basis.spec().boson_cap;
    for (std::size_t i = 0; i < bos.size(); ++i) ok = ok && basis.states()[s][i] < bos[i].cutoff;
    if (ok) p(s, s) = 1.0;
  }
  return LinOp(basis.space(), std::move(p));
}

LinOp top_sector_projector(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.dim(); ++s)
    if (basis.boson_number(s) == basis.max_boson_number()) p(s, s) = 1.0;
  return LinOp(basis.space(), std::move(p));
}

double top_sector_fraction(const FockBasis& basis, const Vector& v) {
  require_dim(*basis.space(), v.size(), "top_sector_fraction");
  const double total = v.norm();
  if (total == 0.0) return 0.0;
  double top = 0.0;
  for (std::size_t s = 0; s < basis.dim(); ++s)
    if (basis.boson_number(s) == basis.max_boson_number()) top += std::norm(v(s));
  return std::sqrt(top) / total;
}

}  // namespace dysonprop
