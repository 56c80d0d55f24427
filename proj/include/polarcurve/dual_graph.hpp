#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polarcurve/cluster.hpp"

namespace polar {

enum class DivisorClass { Contact, Puiseux };

struct DGVertex {
  int id = -1;
  Rat contact;        // v(E)
  long mult = 1;      // m(E)
  int branching = 0;  // b_E: child edges plus arrows
  long ram_jump = 1;  // n_E
  long base_mult = 1; // m(E)/n_E
  int pair_depth = 0; // k_E
  DivisorClass cls = DivisorClass::Contact;
  long self_int = -1;
  int parent = -1;
  std::vector<int> children;
  std::vector<int> arrows;          // branch ids
  std::vector<Rat> curvette_values; // characteristic exponent values of an
                                    // E-curvette strictly below v(E)
};

struct DualGraph {
  std::vector<DGVertex> vertices;                // index == id
  std::vector<std::pair<int, int>> dead_arcs;    // (bifurcation id, terminal id)
  std::vector<std::vector<int>> geodesics;       // per branch: root..arrow divisor
  std::vector<bool> branch_is_adjoint;           // aligned with arrows' branch ids
  int root = 0;

  int branch_count() const { return static_cast<int>(geodesics.size()); }
  bool is_bifurcation(int v) const { return vertices[static_cast<size_t>(v)].branching >= 2; }
  bool is_terminal(int v) const { return vertices[static_cast<size_t>(v)].branching == 0; }
  bool on_dead_arc(int v) const;
  std::optional<int> dead_arc_of_bifurcation(int v) const;  // terminal id
  std::vector<int> branches_through(int v) const;           // I_E
  std::vector<int> branches_through_star(int v) const;      // I_E^*
  std::string str() const;
};

// invariant checks; throws on violation (v monotone, m = n*n_, definiteness)
void validate_graph(const DualGraph& g);

DualGraph build_dual_graph(const EquisType& e);
DualGraph graph_from_resolution(const Resolution& r, bool primary_arrows_only);

struct KindWitness {
  bool kind = true;
  int bad_bifurcation = -1;
  int bad_terminal = -1;
  long m_b = 0, m_t = 0;
};

KindWitness is_kind(const DualGraph& g);

// G(C union Z) for a perfect adjoint Z: arrows added by the four-case rule.
DualGraph chi_graph(const DualGraph& g);

// expected branch types of Z^E at a bifurcation divisor E
struct AdjointPiece {
  BranchType type;
  int count = 0;
};
std::vector<AdjointPiece> adjoint_branch_types(const DualGraph& g, int vertex);

// decorated-graph isomorphism (v, m, self-intersection, arrow counts)
bool graphs_isomorphic(const DualGraph& a, const DualGraph& b);
std::string canonical_signature(const DualGraph& g);

// decomposition of a strict adjoint per (D-i)/(D-ii)
struct AdjointDecomposition {
  std::vector<std::pair<int, std::vector<int>>> assignment;  // vertex -> Z branch ids
  std::vector<int> residual;                                 // unassignable Z branches
  bool budget_ok = true;
  std::string report;
};

// zc: equisingularity data of Z union C; is_adjoint marks the Z branches.
AdjointDecomposition decompose_adjoint(const std::vector<MarkedBranch>& zc,
                                       const std::vector<std::vector<Rat>>& coinc,
                                       const DualGraph& gc);

}  // namespace polar
