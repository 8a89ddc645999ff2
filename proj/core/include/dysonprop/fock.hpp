#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dysonprop/graded.hpp"

namespace dysonprop {

struct BosonMode {
  std::string label;
  double energy = 0.0;
  int cutoff = 1;
};

struct FermionMode {
  std::string label;
  double energy = 0.0;
};

struct ModeSpec {
  std::vector<BosonMode> bosons;
  std::vector<FermionMode> fermions;
  std::vector<std::string> scalar_modes;
  // Optional cap on the total boson number (keeps only the sectors N_b <= cap).
  std::optional<int> boson_cap;

  void validate() const;
};

// Occupation basis, lexicographic with bosons first; grade = total boson number.
class FockBasis {
 public:
  explicit FockBasis(ModeSpec spec);

  const ModeSpec& spec() const { return spec_; }
  std::size_t dim() const { return states_.size(); }
  const std::vector<std::vector<int>>& states() const { return states_; }
  std::optional<std::size_t> index_of(const std::vector<int>& occupation) const;
  const SpacePtr& space() const { return space_; }

  std::size_t mode_count() const { return spec_.bosons.size() + spec_.fermions.size(); }
  // Position of a label in the occupation tuple; throws InputError for unknown labels.
  std::size_t mode_position(const std::string& label) const;
  bool is_boson(const std::string& label) const;
  int boson_number(std::size_t state) const;
  // Largest total boson number present in the basis.
  int max_boson_number() const { return max_bosons_; }

 private:
  ModeSpec spec_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, std::size_t> index_;
  SpacePtr space_;
  int max_bosons_ = 0;
};

struct LadderPair {
  LinOp annihilator;
  LinOp creator;
};

LadderPair boson_ops(const FockBasis& basis, const std::string& mode);
LadderPair fermion_ops(const FockBasis& basis, const std::string& mode);

// One energy per mode, bosons first then fermions, in declaration order.
LinOp second_quantize(const FockBasis& basis, const std::vector<double>& energies);
LinOp second_quantize(const FockBasis& basis);
LinOp boson_number_operator(const FockBasis& basis);

LinOp eta_metric(const FockBasis& basis, const std::vector<std::string>& scalar_modes);
LinOp eta_metric(const FockBasis& basis);

// Projector onto states from which one more boson can be created in every mode.
LinOp below_cap_projector(const FockBasis& basis);
// Projector onto the states carrying the largest total boson number.
LinOp top_sector_projector(const FockBasis& basis);
// ||P_top v|| / ||v||.
double top_sector_fraction(const FockBasis& basis, const Vector& v);

}  // namespace dysonprop
