#include "polarcurve/dual_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace polar {

bool DualGraph::on_dead_arc(int v) const {
  for (const auto& [b, t] : dead_arcs) {
    int cur = t;
    while (cur >= 0) {
      if (cur == v) return true;
      if (cur == b) break;
      cur = vertices[static_cast<size_t>(cur)].parent;
    }
  }
  return false;
}

std::optional<int> DualGraph::dead_arc_of_bifurcation(int v) const {
  for (const auto& [b, t] : dead_arcs)
    if (b == v) return t;
  return std::nullopt;
}

std::vector<int> DualGraph::branches_through(int v) const {
  std::vector<int> out;
  for (int b = 0; b < branch_count(); ++b) {
    const auto& geo = geodesics[static_cast<size_t>(b)];
    if (std::find(geo.begin(), geo.end(), v) != geo.end()) out.push_back(b);
  }
  return out;
}

std::vector<int> DualGraph::branches_through_star(int v) const {
  // I_E^*: branches whose Puiseux exponent realizes v(E)
  std::vector<int> out;
  (void)v;
  return out;  // filled by consumers that know branch types; see log_model
}

std::string DualGraph::str() const {
  std::ostringstream os;
  for (const auto& vx : vertices) {
    os << "E" << vx.id << " v=" << to_string(vx.contact) << " m=" << vx.mult
       << " b=" << vx.branching << " n=" << vx.ram_jump << " n_=" << vx.base_mult
       << " k=" << vx.pair_depth << " class="
       << (vx.cls == DivisorClass::Puiseux ? "puiseux" : "contact") << " self=" << vx.self_int
       << " parent=" << vx.parent;
    if (!vx.arrows.empty()) {
      os << " arrows=[";
      for (size_t k = 0; k < vx.arrows.size(); ++k) {
        if (k) os << ",";
        os << vx.arrows[k];
      }
      os << "]";
    }
    os << "\n";
  }
  for (const auto& [b, t] : dead_arcs) os << "dead_arc E" << b << " -> E" << t << "\n";
  return os.str();
}

DualGraph graph_from_resolution(const Resolution& r, bool primary_arrows_only) {
  DualGraph g;
  size_t nd = r.divisors.size();
  if (nd == 0) throw scalar_error("empty resolution");
  g.vertices.resize(nd);
  for (size_t k = 0; k < nd; ++k) {
    const auto& d = r.divisors[k];
    DGVertex& v = g.vertices[k];
    v.id = d.id;
    v.contact = d.contact;
    v.mult = d.mult;
    v.self_int = d.self_int;
    // classification from the creation point's consumed exponents
    const auto& pt = r.points[static_cast<size_t>(d.origin_point)];
    Int q_prev(1);
    for (const Rat& e : pt.consumed) q_prev = lcm_int(q_prev, den(e));
    Int q_full = lcm_int(q_prev, den(d.contact));
    v.ram_jump = to_long(q_full / q_prev);
    v.cls = (v.ram_jump > 1) ? DivisorClass::Puiseux : DivisorClass::Contact;
    v.base_mult = v.mult / v.ram_jump;
    // pair depth and curvette exponents: lcm jumps among consumed exponents
    int jumps = 0;
    Int run(1);
    std::vector<Rat> cons = pt.consumed;
    std::sort(cons.begin(), cons.end());
    for (const Rat& e : cons) {
      Int nrun = lcm_int(run, den(e));
      if (nrun > run) {
        ++jumps;
        v.curvette_values.push_back(e);
      }
      run = nrun;
    }
    v.pair_depth = jumps;
  }
  // tree structure from edges, rooted at divisor 0 (first blow-up)
  std::vector<std::vector<int>> adj(nd);
  for (auto [a, b] : r.edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  g.root = 0;
  {
    std::vector<int> stack{0};
    std::vector<bool> seen(nd, false);
    seen[0] = true;
    g.vertices[0].parent = -1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<size_t>(v)]) {
        if (seen[static_cast<size_t>(w)]) continue;
        seen[static_cast<size_t>(w)] = true;
        g.vertices[static_cast<size_t>(w)].parent = v;
        g.vertices[static_cast<size_t>(v)].children.push_back(w);
        stack.push_back(w);
      }
    }
    for (bool s : seen)
      if (!s) throw scalar_error("disconnected dual graph");
  }
  // arrows and geodesics
  size_t nb = r.arrow_divisor.size();
  g.branch_is_adjoint = r.branch_is_adjoint;
  g.geodesics.assign(nb, {});
  for (size_t b = 0; b < nb; ++b) {
    if (primary_arrows_only && r.branch_is_adjoint[b]) continue;
    int av = r.arrow_divisor[b];
    if (av < 0) throw scalar_error("branch without arrow divisor");
    g.vertices[static_cast<size_t>(av)].arrows.push_back(static_cast<int>(b));
    std::vector<int> path;
    for (int cur = av; cur >= 0; cur = g.vertices[static_cast<size_t>(cur)].parent)
      path.push_back(cur);
    std::reverse(path.begin(), path.end());
    g.geodesics[b] = std::move(path);
  }
  // branching numbers
  for (auto& v : g.vertices)
    v.branching = static_cast<int>(v.children.size() + v.arrows.size());
  // dead arcs: walk up from terminals through b=1 chains
  for (const auto& v : g.vertices) {
    if (v.branching != 0) continue;
    int cur = v.parent;
    while (cur >= 0 && g.vertices[static_cast<size_t>(cur)].branching == 1)
      cur = g.vertices[static_cast<size_t>(cur)].parent;
    if (cur >= 0 && g.vertices[static_cast<size_t>(cur)].branching >= 2)
      g.dead_arcs.emplace_back(cur, v.id);
  }
  validate_graph(g);
  return g;
}

DualGraph build_dual_graph(const EquisType& e) {
  validate_equis(e);
  std::vector<MarkedBranch> mb;
  for (const auto& b : e.branches) mb.push_back({b, false});
  Resolution r = resolve_cluster(mb, e.coinc, Schedule::Union);
  return graph_from_resolution(r, false);
}

void validate_graph(const DualGraph& g) {
  for (const auto& v : g.vertices) {
    if (v.mult != v.ram_jump * v.base_mult) throw scalar_error("m != n * n_ at a vertex");
    if (v.parent >= 0) {
      const auto& p = g.vertices[static_cast<size_t>(v.parent)];
      if (!(p.contact < v.contact))
        throw scalar_error("contact order not increasing along the tree");
    }
  }
  for (const auto& [b, t] : g.dead_arcs) {
    if (g.vertices[static_cast<size_t>(t)].branching != 0)
      throw scalar_error("dead arc terminal is not terminal");
    if (g.vertices[static_cast<size_t>(b)].branching < 2)
      throw scalar_error("dead arc does not start at a bifurcation");
    // m(E_t) = n_(E_b)
    if (g.vertices[static_cast<size_t>(t)].mult !=
        g.vertices[static_cast<size_t>(b)].base_mult)
      throw scalar_error("dead arc multiplicity relation fails");
  }
  // negative definite intersection matrix (leading principal minors alternate)
  size_t n = g.vertices.size();
  std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) m[i][i] = Rat(g.vertices[i].self_int);
  for (const auto& v : g.vertices)
    if (v.parent >= 0) {
      m[static_cast<size_t>(v.id)][static_cast<size_t>(v.parent)] = 1;
      m[static_cast<size_t>(v.parent)][static_cast<size_t>(v.id)] = 1;
    }
  // Gaussian elimination tracking pivot signs
  for (size_t k = 0; k < n; ++k) {
    if (!(m[k][k] < 0)) throw scalar_error("intersection matrix not negative definite");
    for (size_t i = k + 1; i < n; ++i) {
      if (m[i][k] == 0) continue;
      Rat f = m[i][k] / m[k][k];
      for (size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
}

KindWitness is_kind(const DualGraph& g) {
  KindWitness w;
  for (const auto& [b, t] : g.dead_arcs) {
    long mb = g.vertices[static_cast<size_t>(b)].mult;
    long mt = g.vertices[static_cast<size_t>(t)].mult;
    if (mb != 2 * mt) {
      w.kind = false;
      w.bad_bifurcation = b;
      w.bad_terminal = t;
      w.m_b = mb;
      w.m_t = mt;
      return w;
    }
  }
  return w;
}

DualGraph chi_graph(const DualGraph& g) {
  KindWitness w = is_kind(g);
  if (!w.kind)
    throw scalar_error("chi graph undefined: not kind (dead arc E" +
                       std::to_string(w.bad_bifurcation) + "->E" +
                       std::to_string(w.bad_terminal) + " with m=" + std::to_string(w.m_b) +
                       "," + std::to_string(w.m_t) + ")");
  DualGraph out = g;
  int next_branch = out.branch_count();
  auto add_arrows = [&](int v, int count) {
    for (int k = 0; k < count; ++k) {
      out.vertices[static_cast<size_t>(v)].arrows.push_back(next_branch);
      std::vector<int> path;
      for (int cur = v; cur >= 0; cur = out.vertices[static_cast<size_t>(cur)].parent)
        path.push_back(cur);
      std::reverse(path.begin(), path.end());
      out.geodesics.push_back(std::move(path));
      out.branch_is_adjoint.push_back(true);
      ++next_branch;
    }
  };
  for (const auto& v : g.vertices) {
    if (v.branching >= 2) {
      if (g.on_dead_arc(v.id))
        add_arrows(v.id, v.branching - 2);
      else
        add_arrows(v.id, v.branching - 1);
    } else if (v.branching == 0) {
      bool terminal_of_arc = false;
      for (const auto& [b, t] : g.dead_arcs)
        if (t == v.id) terminal_of_arc = true;
      if (terminal_of_arc) add_arrows(v.id, 1);
    }
  }
  // recompute derived data
  for (auto& v : out.vertices)
    v.branching = static_cast<int>(v.children.size() + v.arrows.size());
  out.dead_arcs.clear();
  for (const auto& v : out.vertices) {
    if (v.branching != 0) continue;
    int cur = v.parent;
    while (cur >= 0 && out.vertices[static_cast<size_t>(cur)].branching == 1)
      cur = out.vertices[static_cast<size_t>(cur)].parent;
    if (cur >= 0 && out.vertices[static_cast<size_t>(cur)].branching >= 2)
      out.dead_arcs.emplace_back(cur, v.id);
  }
  validate_graph(out);
  return out;
}

std::vector<AdjointPiece> adjoint_branch_types(const DualGraph& g, int vertex) {
  const DGVertex& E = g.vertices[static_cast<size_t>(vertex)];
  if (E.branching < 2) throw scalar_error("adjoint_branch_types: not a bifurcation divisor");
  KindWitness w = is_kind(g);
  if (!w.kind) throw scalar_error("adjoint_branch_types requires a kind type");
  auto piece = [&](long mult, bool include_v) {
    std::vector<long> beta{mult};
    for (const Rat& val : E.curvette_values) {
      Rat s = val * Rat(mult);
      if (!is_integer(s)) throw scalar_error("non-integral adjoint exponent");
      beta.push_back(to_long(num(s)));
    }
    if (include_v) {
      Rat s = E.contact * Rat(mult);
      if (!is_integer(s)) throw scalar_error("non-integral adjoint exponent");
      beta.push_back(to_long(num(s)));
    }
    return branch_type_from_exponents(beta);
  };
  std::vector<AdjointPiece> out;
  if (E.cls == DivisorClass::Contact) {
    out.push_back({piece(E.base_mult, false), E.branching - 1});
  } else if (g.on_dead_arc(vertex)) {
    out.push_back({piece(E.base_mult, false), 1});
    if (E.branching - 2 > 0)
      out.push_back({piece(E.base_mult * E.ram_jump, true), E.branching - 2});
  } else {
    out.push_back({piece(E.base_mult * E.ram_jump, true), E.branching - 1});
  }
  return out;
}

std::string canonical_signature(const DualGraph& g) {
  // recursive canonical form over the rooted tree
  std::function<std::string(int)> rec = [&](int v) -> std::string {
    const DGVertex& vx = g.vertices[static_cast<size_t>(v)];
    std::vector<std::string> kids;
    for (int c : vx.children) kids.push_back(rec(c));
    std::sort(kids.begin(), kids.end());
    std::ostringstream os;
    os << "(v=" << to_string(vx.contact) << ";m=" << vx.mult << ";s=" << vx.self_int
       << ";a=" << vx.arrows.size();
    for (auto& k : kids) os << k;
    os << ")";
    return os.str();
  };
  return rec(g.root);
}

bool graphs_isomorphic(const DualGraph& a, const DualGraph& b) {
  return canonical_signature(a) == canonical_signature(b);
}

AdjointDecomposition decompose_adjoint(const std::vector<MarkedBranch>& zc,
                                       const std::vector<std::vector<Rat>>& coinc,
                                       const DualGraph& gc) {
  AdjointDecomposition out;
  std::ostringstream rep;
  // map C branches of zc to gc branch ids in order of appearance
  std::vector<int> c_index;  // zc index -> gc branch id
  {
    int next = 0;
    for (size_t k = 0; k < zc.size(); ++k) c_index.push_back(zc[k].adjoint ? -1 : next++);
  }
  std::map<int, std::vector<int>> assign;
  for (size_t z = 0; z < zc.size(); ++z) {
    if (!zc[z].adjoint) continue;
    std::optional<int> found;
    bool consistent = true;
    for (size_t c = 0; c < zc.size(); ++c) {
      if (zc[c].adjoint) continue;
      int cb = c_index[c];
      const auto& geo = gc.geodesics[static_cast<size_t>(cb)];
      for (int v : geo) {
        if (!gc.is_bifurcation(v)) continue;
        if (gc.vertices[static_cast<size_t>(v)].contact == coinc[z][c]) {
          if (found && *found != v) consistent = false;
          found = v;
        }
      }
    }
    if (!found || !consistent) {
      out.residual.push_back(static_cast<int>(z));
      continue;
    }
    // (D-ii): for C_j whose geodesic misses E, the coincidence with z matches
    // the one with any C_i through E
    for (size_t c = 0; c < zc.size(); ++c) {
      if (zc[c].adjoint) continue;
      int cb = c_index[c];
      const auto& geo = gc.geodesics[static_cast<size_t>(cb)];
      if (std::find(geo.begin(), geo.end(), *found) != geo.end()) continue;
      for (size_t c2 = 0; c2 < zc.size(); ++c2) {
        if (zc[c2].adjoint) continue;
        int cb2 = c_index[c2];
        const auto& geo2 = gc.geodesics[static_cast<size_t>(cb2)];
        if (std::find(geo2.begin(), geo2.end(), *found) == geo2.end()) continue;
        if (coinc[z][c] != coinc[c][c2]) consistent = false;
      }
    }
    if (!consistent) {
      out.residual.push_back(static_cast<int>(z));
      continue;
    }
    assign[*found].push_back(static_cast<int>(z));
  }
  // D1 budget: m0(Z^E)
  for (auto& [v, zs] : assign) {
    const DGVertex& E = gc.vertices[static_cast<size_t>(v)];
    long budget = gc.on_dead_arc(v) ? E.base_mult * E.ram_jump * (E.branching - 1) - E.base_mult
                                    : E.base_mult * E.ram_jump * (E.branching - 1);
    long got = 0;
    for (int z : zs) got += zc[static_cast<size_t>(z)].type.mult0();
    rep << "E" << v << ": assigned " << zs.size() << " branches, m0 " << got << " / budget "
        << budget << (got == budget ? " ok" : " MISMATCH") << "\n";
    if (got != budget) out.budget_ok = false;
    out.assignment.emplace_back(v, zs);
  }
  out.report = rep.str();
  return out;
}

}  // namespace polar
