#pragma once

#include "polarcurve/dual_graph.hpp"

namespace polar {

struct RamifiedGraph {
  DualGraph graph;                       // G(rho^-1 C)
  EquisType equis;                       // equisingularity type of rho^-1 C
  std::vector<std::vector<int>> assoc;   // per divisor E of G(C): associated
                                         // divisor ids in the ramified graph
  std::vector<std::vector<int>> branch_classes;  // per original branch: the
                                                 // ramified branch indices
};

// graph of rho^-1 C under the ramification x = u^n, y = v.
// n must be divisible by every branch multiplicity.
RamifiedGraph ramify_graph(const EquisType& e, long n, const DualGraph* gc = nullptr);

// equisingularity type of rho^-1 C alone (smooth branches, coincidences in u)
EquisType ramified_equis(const EquisType& e, long n);

// inverse: recover the type of C from the smooth branches of rho^-1 C
EquisType unramify_equising(const std::vector<PuiseuxBranch>& branches, long n);

}  // namespace polar
