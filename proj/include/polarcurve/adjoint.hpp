#pragma once

#include "polarcurve/dual_graph.hpp"

namespace polar {

struct AdjointVerdict {
  bool strict = false;
  bool perfect = false;
  std::string reason;
};

// Checks whether the adjoint-marked part Z satisfies m_p(Z) = m_p(C) - 1 at
// every infinitely near point of C and misses the corners of C's
// desingularization (strict), and additionally meets every divisor in
// exactly b_E - 1 points outside C (perfect).  The branches are expected to
// describe the ramified pair, with the C part non-singular.
AdjointVerdict check_adjoint(const std::vector<MarkedBranch>& branches,
                             const std::vector<std::vector<Rat>>& coinc);

// Spec-level wrappers on the joint (Z relative to C) equisingularity data.
bool is_strict_adjoint(const std::vector<MarkedBranch>& branches,
                       const std::vector<std::vector<Rat>>& coinc);
bool is_perfect_adjoint(const std::vector<MarkedBranch>& branches,
                        const std::vector<std::vector<Rat>>& coinc);

// True when the minimal resolution of the C part also resolves the union,
// i.e. the adjoint branches end smooth, separated and away from corners.
bool resolved_by_primary(const std::vector<MarkedBranch>& branches,
                         const std::vector<std::vector<Rat>>& coinc);

}  // namespace polar
