#include "polarcurve/adjoint.hpp"

#include <sstream>

namespace polar {

AdjointVerdict check_adjoint(const std::vector<MarkedBranch>& branches,
                             const std::vector<std::vector<Rat>>& coinc) {
  AdjointVerdict v;
  for (const auto& b : branches)
    if (!b.adjoint && !b.type.smooth())
      throw scalar_error("check_adjoint: the primary curve must have smooth branches");
  Resolution r = resolve_cluster(branches, coinc, Schedule::PrimaryOnly);
  std::ostringstream why;

  // multiplicity condition at every infinitely near point of C
  bool mult_ok = true;
  for (const auto& pt : r.points) {
    long mc = pt.total_mult(false, r.branch_is_adjoint);
    if (mc == 0) continue;
    long mz = pt.total_mult(true, r.branch_is_adjoint);
    if (mz != mc - 1) {
      mult_ok = false;
      why << "point " << pt.id << ": m(Z)=" << mz << " != m(C)-1=" << mc - 1 << "; ";
      break;
    }
  }
  // corner avoidance at the end of the primary schedule
  bool corner_ok = true;
  for (size_t b = 0; b < branches.size(); ++b) {
    if (!branches[b].adjoint) continue;
    int fp = r.final_point[b];
    const auto& pt = r.points[static_cast<size_t>(fp)];
    if (pt.base_div >= 0 && pt.fiber_div >= 0) {
      corner_ok = false;
      why << "adjoint branch " << b << " ends at a corner; ";
      break;
    }
  }
  v.strict = mult_ok && corner_ok;
  if (v.strict) {
    // b_E - 1 extra points on every divisor
    DualGraph gc = graph_from_resolution(r, true);
    bool ok = true;
    for (const auto& d : r.divisors) {
      int expected = gc.vertices[static_cast<size_t>(d.id)].branching - 1;
      if (d.classes_adjoint_only != expected) {
        ok = false;
        why << "E" << d.id << ": " << d.classes_adjoint_only << " adjoint points, expected "
            << expected << "; ";
        break;
      }
    }
    v.perfect = ok;
  }
  v.reason = why.str();
  return v;
}

bool is_strict_adjoint(const std::vector<MarkedBranch>& branches,
                       const std::vector<std::vector<Rat>>& coinc) {
  return check_adjoint(branches, coinc).strict;
}

bool is_perfect_adjoint(const std::vector<MarkedBranch>& branches,
                        const std::vector<std::vector<Rat>>& coinc) {
  return check_adjoint(branches, coinc).perfect;
}

bool resolved_by_primary(const std::vector<MarkedBranch>& branches,
                         const std::vector<std::vector<Rat>>& coinc) {
  Resolution r = resolve_cluster(branches, coinc, Schedule::PrimaryOnly);
  for (size_t b = 0; b < branches.size(); ++b) {
    if (!branches[b].adjoint) continue;
    if (!r.branch_smooth_at_end[b]) return false;
    int fp = r.final_point[b];
    const auto& pt = r.points[static_cast<size_t>(fp)];
    if (pt.base_div >= 0 && pt.fiber_div >= 0) return false;
    if (pt.branches_here.size() > 1) return false;  // not separated there
  }
  return true;
}

}  // namespace polar
