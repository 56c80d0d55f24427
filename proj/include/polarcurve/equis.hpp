#pragma once

#include <string>
#include <vector>

#include "polarcurve/puiseux.hpp"

namespace polar {

// Combinatorial type of one branch: characteristic exponents and Puiseux pairs.
struct BranchType {
  std::vector<long> char_exponents;              // beta_0, beta_1, ..., beta_g
  std::vector<std::pair<long, long>> puiseux_pairs;  // (m_l, n_l), coprime

  long mult0() const { return char_exponents.empty() ? 1 : char_exponents.front(); }
  int genus() const { return static_cast<int>(char_exponents.size()) - 1; }
  bool smooth() const { return mult0() == 1; }
  // exponent values beta_l / beta_0 for l >= 1
  std::vector<Rat> exponent_values() const;
  bool operator==(const BranchType&) const = default;
  std::string str() const;
};

BranchType branch_type(const PuiseuxBranch& b);
// from beta_0..beta_g (validates and derives the pairs)
BranchType branch_type_from_exponents(std::vector<long> beta);

// Equisingularity datum: branch types plus the pairwise coincidence matrix.
struct EquisType {
  std::vector<BranchType> branches;
  std::vector<std::vector<Rat>> coinc;  // symmetric; diagonal unused

  size_t size() const { return branches.size(); }
  bool operator==(const EquisType&) const = default;
  std::string str() const;
};

// Throws scalar_error on ultrametric violations or inadmissible coincidences.
void validate_equis(const EquisType& e);

EquisType equisingularity_type(const ExpandResult& r);
EquisType equisingularity_type(const std::vector<PuiseuxBranch>& branches);

// minimal generators of the value semigroup
std::vector<long> semigroup_generators(const BranchType& t);

// (gamma,delta)_0 from gamma's type, delta's multiplicity and the coincidence
long intersection_multiplicity(const BranchType& gamma, long delta_m0, const Rat& coinc);

// serialization (plain text, one branch per line then the coincidences)
std::string emit_equis(const EquisType& e);
EquisType parse_equis(const std::string& text);

}  // namespace polar
