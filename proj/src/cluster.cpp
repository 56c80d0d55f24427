#include "polarcurve/cluster.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace polar {

long ClusterPoint::total_mult(bool adjoint_only, const std::vector<bool>& is_adjoint) const {
  long m = 0;
  for (size_t k = 0; k < branches_here.size(); ++k) {
    bool adj = is_adjoint[static_cast<size_t>(branches_here[k])];
    if (adjoint_only == adj) m += branch_mult[k];
  }
  return m;
}

namespace {

struct FragState {
  int branch = -1;
  std::vector<Rat> ladder;  // unconsumed original exponents, ascending
  // local exponent of original e is (e - map_b) / map_a
  Rat map_a = Rat(1), map_b = Rat(0);

  Rat local(const Rat& e) const { return (e - map_b) / map_a; }
  Rat original(const Rat& u) const { return map_a * u + map_b; }
};

struct BranchStatic {
  long n = 1;          // multiplicity of the branch
  Rat tail_start;      // generic coefficients strictly beyond this exponent
  std::vector<Rat> char_values;  // beta_l / beta_0
};

struct Sim {
  std::vector<BranchStatic> stat;
  std::vector<std::vector<Rat>> coinc;
  std::vector<bool> is_adjoint;
  Schedule schedule = Schedule::Union;
  Resolution res;

  // first generic tail exponent of branch b strictly above both the tail
  // start and the local-positivity bound
  Rat tail_exponent(const FragState& f) const {
    const BranchStatic& bs = stat[static_cast<size_t>(f.branch)];
    Rat lo = std::max(bs.tail_start, f.map_b);
    Int k = floor_int(lo * Rat(bs.n));
    Rat e(k + 1, bs.n);
    e.canonicalize();
    return e;
  }

  Rat local_ord(const FragState& f) const {
    Rat t = f.local(tail_exponent(f));
    if (!f.ladder.empty()) t = std::min(t, f.local(f.ladder.front()));
    return t;
  }

  // local ramification index: lcm of local exponent denominators
  long local_ram(const FragState& f) const {
    Int q(1);
    for (const Rat& e : f.ladder) q = lcm_int(q, den(f.local(e)));
    const BranchStatic& bs = stat[static_cast<size_t>(f.branch)];
    // tail lattice: offset + (1/(n * a)) Z
    Rat step = Rat(1, bs.n) / f.map_a;
    q = lcm_int(q, den(step));
    q = lcm_int(q, den(f.local(tail_exponent(f))));
    return to_long(q);
  }

  long local_mult(const FragState& f) const {
    long q = local_ram(f);
    Rat r = local_ord(f);
    if (r >= 1) return q;
    Rat m = Rat(q) * r;
    if (!is_integer(m)) throw scalar_error("non-integral local multiplicity");
    return to_long(num(m));
  }

  bool is_smooth(const FragState& f) const { return local_ram(f) == 1; }

  struct Pending {
    int point = -1;
    std::vector<FragState> frags;
  };

  bool needs_blowup(const ClusterPoint& pt, const std::vector<FragState>& frags) const {
    size_t relevant = 0;
    bool nonsmooth = false;
    for (const auto& f : frags) {
      if (schedule == Schedule::PrimaryOnly && is_adjoint[static_cast<size_t>(f.branch)])
        continue;
      ++relevant;
      if (!is_smooth(f)) nonsmooth = true;
    }
    if (pt.move == Move::Root) return relevant > 0;
    if (relevant >= 2) return true;
    if (relevant == 1 && nonsmooth) return true;
    if (relevant >= 1 && pt.base_div >= 0 && pt.fiber_div >= 0) return true;
    return false;
  }

  Rat lift_contact(int point_id) const {
    // contact of two generic curvettes through the point differing at local 1
    Rat a(1), u(1);
    int p = point_id;
    while (p >= 0) {
      const ClusterPoint& pt = res.points[static_cast<size_t>(p)];
      switch (pt.move) {
        case Move::Root:
          return u;
        case Move::DirCoeff:
          u = u + 1;
          a = Rat(1);
          break;
        case Move::DirZero:
          u = u + 1;
          a = a + 1;
          break;
        case Move::DirInf: {
          Rat na = a / (Rat(1) + a);
          u = (u + Rat(1) - a) / (Rat(1) + a);
          a = na;
          break;
        }
      }
      p = pt.parent;
    }
    return u;
  }

  void record_mults(ClusterPoint& pt, const std::vector<FragState>& frags) {
    for (const auto& f : frags) {
      pt.branches_here.push_back(f.branch);
      pt.branch_mult.push_back(local_mult(f));
    }
  }

  void run(std::vector<FragState> initial) {
    res.points.push_back({});
    res.points[0].id = 0;
    res.points[0].move = Move::Root;
    std::deque<Pending> queue;
    queue.push_back({0, std::move(initial)});
    while (!queue.empty()) {
      Pending cur = std::move(queue.front());
      queue.pop_front();
      ClusterPoint& pt = res.points[static_cast<size_t>(cur.point)];
      record_mults(pt, cur.frags);
      if (!needs_blowup(pt, cur.frags)) {
        for (const auto& f : cur.frags) {
          int b = f.branch;
          res.final_point[static_cast<size_t>(b)] = pt.id;
          res.arrow_divisor[static_cast<size_t>(b)] = pt.base_div;
          res.branch_smooth_at_end[static_cast<size_t>(b)] = is_smooth(f);
        }
        continue;
      }
      blow_up(cur, queue);
    }
  }

  void blow_up(Pending& cur, std::deque<Pending>& queue) {
    int pid = cur.point;
    int div_id = static_cast<int>(res.divisors.size());
    {
      ClusterDivisor d;
      d.id = div_id;
      d.origin_point = pid;
      d.contact = lift_contact(pid);
      Int m = den(d.contact);
      for (const Rat& e : res.points[static_cast<size_t>(pid)].consumed)
        m = lcm_int(m, den(e));
      d.mult = to_long(m);
      res.divisors.push_back(d);
    }
    {
      ClusterPoint& pt = res.points[static_cast<size_t>(pid)];
      pt.blown = true;
      pt.created_div = div_id;
      // intersection bookkeeping
      if (pt.base_div >= 0) {
        res.divisors[static_cast<size_t>(pt.base_div)].self_int -= 1;
        res.edges.emplace_back(pt.base_div, div_id);
      }
      if (pt.fiber_div >= 0) {
        res.divisors[static_cast<size_t>(pt.fiber_div)].self_int -= 1;
        res.edges.emplace_back(pt.fiber_div, div_id);
      }
      if (pt.base_div >= 0 && pt.fiber_div >= 0) {
        std::pair<int, int> e1{pt.base_div, pt.fiber_div}, e2{pt.fiber_div, pt.base_div};
        res.edges.erase(std::remove(res.edges.begin(), res.edges.end(), e1), res.edges.end());
        res.edges.erase(std::remove(res.edges.begin(), res.edges.end(), e2), res.edges.end());
      }
    }

    // partition fragments by direction
    std::vector<size_t> zero_dir, inf_dir;
    struct CoeffClass {
      Rat exponent;       // original exponent of the consumed entry; 0 for tail
      bool from_tail = false;
      std::vector<size_t> members;
    };
    std::vector<CoeffClass> classes;
    for (size_t k = 0; k < cur.frags.size(); ++k) {
      FragState& f = cur.frags[k];
      Rat r = local_ord(f);
      if (r > 1) {
        zero_dir.push_back(k);
        continue;
      }
      if (r < 1) {
        inf_dir.push_back(k);
        continue;
      }
      bool from_ladder = !f.ladder.empty() && f.local(f.ladder.front()) == 1;
      if (!from_ladder) {
        CoeffClass c;
        c.from_tail = true;
        c.members.push_back(k);
        classes.push_back(std::move(c));
        continue;
      }
      Rat e = f.ladder.front();
      bool placed = false;
      for (auto& c : classes) {
        if (c.from_tail || c.exponent != e) continue;
        int other = cur.frags[c.members.front()].branch;
        if (coinc[static_cast<size_t>(f.branch)][static_cast<size_t>(other)] > e) {
          c.members.push_back(k);
          placed = true;
          break;
        }
      }
      if (!placed) {
        CoeffClass c;
        c.exponent = e;
        c.members.push_back(k);
        classes.push_back(std::move(c));
      }
    }

    const ClusterPoint parent_snapshot = res.points[static_cast<size_t>(pid)];

    // adjoint point-count bookkeeping on the new divisor
    {
      auto& d = res.divisors[static_cast<size_t>(div_id)];
      auto count_group = [&](const std::vector<size_t>& idx) {
        if (idx.empty()) return;
        bool has_c = false, has_z = false;
        for (size_t k : idx) {
          if (is_adjoint[static_cast<size_t>(cur.frags[k].branch)])
            has_z = true;
          else
            has_c = true;
        }
        if (has_c)
          d.classes_with_primary += 1;
        else if (has_z)
          d.classes_adjoint_only += 1;
      };
      count_group(zero_dir);
      count_group(inf_dir);
      for (auto& c : classes) count_group(c.members);
    }

    auto new_point = [&](Move mv, int base, int fiber) {
      ClusterPoint np;
      np.id = static_cast<int>(res.points.size());
      np.parent = pid;
      np.move = mv;
      np.base_div = base;
      np.fiber_div = fiber;
      np.consumed = parent_snapshot.consumed;
      res.points.push_back(np);
      return np.id;
    };

    if (!zero_dir.empty()) {
      Pending child;
      child.point = new_point(Move::DirZero, div_id, parent_snapshot.fiber_div);
      for (size_t k : zero_dir) {
        FragState f = cur.frags[k];
        f.map_b = f.map_b + f.map_a;  // local shift by one
        child.frags.push_back(std::move(f));
      }
      queue.push_back(std::move(child));
    }
    if (!inf_dir.empty()) {
      Pending child;
      child.point = new_point(Move::DirInf, div_id, parent_snapshot.base_div);
      for (size_t k : inf_dir) {
        FragState f = cur.frags[k];
        Rat r = local_ord(f);
        // local e -> (e+1)/r - 2, i.e. map' = (a r, 2 a r - a + b)
        f.map_b = Rat(2) * f.map_a * r - f.map_a + f.map_b;
        f.map_a = f.map_a * r;
        child.frags.push_back(std::move(f));
      }
      queue.push_back(std::move(child));
    }
    for (auto& c : classes) {
      Pending child;
      child.point = new_point(Move::DirCoeff, div_id, -1);
      if (!c.from_tail)
        res.points[static_cast<size_t>(child.point)].consumed.push_back(c.exponent);
      for (size_t k : c.members) {
        FragState f = cur.frags[k];
        if (!c.from_tail) f.ladder.erase(f.ladder.begin());
        f.map_b = f.map_b + f.map_a;
        child.frags.push_back(std::move(f));
      }
      queue.push_back(std::move(child));
    }
  }
};

// ladder construction: characteristic exponents plus separation exponents,
// closed under inheritance (entries of a partner below the coincidence).
std::vector<std::vector<Rat>> build_ladders(const std::vector<MarkedBranch>& branches,
                                            const std::vector<std::vector<Rat>>& coinc) {
  size_t n = branches.size();
  std::vector<std::vector<Rat>> ladder(n);
  auto lattice_at = [&](size_t i, const Rat& e) {
    long q = 1;
    for (const Rat& v : branches[i].type.exponent_values())
      if (v < e) q = std::lcm(q, den_l(v));
    return q;
  };
  auto admissible = [&](size_t i, const Rat& e) {
    if (std::lcm(lattice_at(i, e), den_l(e)) == lattice_at(i, e)) return true;
    for (const Rat& v : branches[i].type.exponent_values())
      if (v == e) return true;
    return false;
  };
  auto add = [&](size_t i, const Rat& e) {
    auto& L = ladder[i];
    if (std::find(L.begin(), L.end(), e) == L.end()) L.push_back(e);
  };
  for (size_t i = 0; i < n; ++i)
    for (const Rat& v : branches[i].type.exponent_values()) add(i, v);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const Rat& c = coinc[i][j];
      bool ai = admissible(i, c), aj = admissible(j, c);
      if (!ai && !aj)
        throw scalar_error("coincidence " + to_string(c) + " inadmissible for both branches");
      if (ai) add(i, c);
      if (aj) add(j, c);
    }
  // inheritance closure: e in ladder(j), e < coinc(i,j) => e in ladder(i)
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        for (const Rat& e : ladder[j]) {
          if (e < coinc[i][j] &&
              std::find(ladder[i].begin(), ladder[i].end(), e) == ladder[i].end()) {
            if (!admissible(i, e))
              throw scalar_error("inherited exponent " + to_string(e) +
                                 " inadmissible for branch " + std::to_string(i));
            ladder[i].push_back(e);
            changed = true;
          }
        }
      }
  }
  for (auto& L : ladder) std::sort(L.begin(), L.end());
  return ladder;
}

}  // namespace

Resolution resolve_cluster(const std::vector<MarkedBranch>& branches,
                           const std::vector<std::vector<Rat>>& coinc, Schedule schedule) {
  size_t n = branches.size();
  if (n == 0) throw scalar_error("resolve_cluster: no branches");
  Sim sim;
  sim.schedule = schedule;
  sim.coinc = coinc;
  sim.res.arrow_divisor.assign(n, -1);
  sim.res.final_point.assign(n, -1);
  sim.res.branch_smooth_at_end.assign(n, false);
  for (const auto& b : branches) {
    sim.is_adjoint.push_back(b.adjoint);
    BranchStatic bs;
    bs.n = b.type.mult0();
    bs.char_values = b.type.exponent_values();
    Rat ts(1);
    for (const Rat& v : bs.char_values) ts = std::max(ts, v);
    for (size_t j = 0; j < n; ++j) ts = std::max(ts, Rat(0));
    bs.tail_start = ts;
    sim.stat.push_back(std::move(bs));
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) {
        Rat c = coinc[i][j];
        auto& bs = sim.stat[i];
        bs.tail_start = std::max(bs.tail_start, c);
      }
  sim.res.branch_is_adjoint = sim.is_adjoint;

  auto ladders = build_ladders(branches, coinc);
  std::vector<FragState> init;
  for (size_t i = 0; i < n; ++i) {
    FragState f;
    f.branch = static_cast<int>(i);
    f.ladder = ladders[i];
    init.push_back(std::move(f));
  }
  sim.run(std::move(init));
  return sim.res;
}

std::vector<ClusterTreeNode> infinitely_near_multiplicities(const EquisType& e) {
  std::vector<MarkedBranch> mb;
  for (const auto& b : e.branches) mb.push_back({b, false});
  Resolution r = resolve_cluster(mb, e.coinc, Schedule::Union);
  std::vector<ClusterTreeNode> out;
  std::vector<int> remap(r.points.size(), -1);
  for (const auto& pt : r.points) {
    if (pt.branches_here.empty()) continue;
    ClusterTreeNode nd;
    nd.id = static_cast<int>(out.size());
    remap[static_cast<size_t>(pt.id)] = nd.id;
    int par = pt.parent;
    while (par >= 0 && remap[static_cast<size_t>(par)] < 0)
      par = r.points[static_cast<size_t>(par)].parent;
    nd.parent = par < 0 ? -1 : remap[static_cast<size_t>(par)];
    nd.branches_here = pt.branches_here;
    nd.branch_mult = pt.branch_mult;
    nd.mult = 0;
    for (long m : pt.branch_mult) nd.mult += m;
    nd.satellite = pt.base_div >= 0 && pt.fiber_div >= 0;
    nd.blown = pt.blown;
    out.push_back(std::move(nd));
  }
  return out;
}

}  // namespace polar
