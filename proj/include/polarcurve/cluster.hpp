#pragma once

#include <optional>
#include <vector>

#include "polarcurve/equis.hpp"

namespace polar {

// Combinatorial resolution of a (marked) union of branches from its
// equisingularity data.  Blow-ups are simulated on virtual Puiseux series:
// each branch contributes an exponent ladder (characteristic exponents plus
// separation exponents from the coincidence matrix) with coefficient classes
// decided by the ultrametric; generic realizability fills everything else.

enum class Move { Root, DirZero, DirCoeff, DirInf };

struct ClusterPoint {
  int id = -1;
  int parent = -1;
  Move move = Move::Root;
  int base_div = -1;   // divisor {base coordinate = 0} through this point
  int fiber_div = -1;  // second divisor when the point is a corner
  std::vector<Rat> consumed;  // original exponents fixed along the center
  bool blown = false;
  int created_div = -1;       // divisor created when this point is blown up
  std::vector<int> branches_here;   // branch ids through this point
  std::vector<long> branch_mult;    // local multiplicities, aligned
  long total_mult(bool adjoint_only, const std::vector<bool>& is_adjoint) const;
};

struct ClusterDivisor {
  int id = -1;
  int origin_point = -1;  // the point whose blow-up created it
  Rat contact;            // v(E): coincidence of two curvettes
  long mult = 1;          // m(E): multiplicity of a curvette at the origin
  long self_int = -1;
  // divisor classes present on E_red at creation, for adjoint point counts
  int classes_with_primary = 0;   // directions containing a C-branch
  int classes_adjoint_only = 0;   // directions with only Z-branches
};

struct Resolution {
  std::vector<ClusterPoint> points;
  std::vector<ClusterDivisor> divisors;
  std::vector<std::pair<int, int>> edges;      // divisor id pairs
  std::vector<int> arrow_divisor;              // per branch: divisor met
  std::vector<int> final_point;                // per branch: terminal point id
  std::vector<bool> branch_is_adjoint;
  std::vector<bool> branch_smooth_at_end;      // strict transform smooth
};

struct MarkedBranch {
  BranchType type;
  bool adjoint = false;  // true: belongs to Z, false: belongs to C
};

// schedule: Union -> minimal resolution of all branches;
//           PrimaryOnly -> minimal resolution of the non-adjoint part, with
//           adjoint branches carried as passengers.
enum class Schedule { Union, PrimaryOnly };

Resolution resolve_cluster(const std::vector<MarkedBranch>& branches,
                           const std::vector<std::vector<Rat>>& coinc, Schedule schedule);

// The infinitely near points of the curve through its minimal resolution.
struct ClusterTreeNode {
  int id = -1;
  int parent = -1;
  long mult = 0;                     // m_p(C)
  std::vector<long> branch_mult;    // aligned with branches_here
  std::vector<int> branches_here;
  bool satellite = false;
  bool blown = false;  // false: final position of a strict transform
};

std::vector<ClusterTreeNode> infinitely_near_multiplicities(const EquisType& e);

}  // namespace polar
