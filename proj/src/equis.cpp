#include "polarcurve/equis.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace polar {

std::vector<Rat> BranchType::exponent_values() const {
  std::vector<Rat> out;
  for (size_t l = 1; l < char_exponents.size(); ++l) {
    Rat v = rq(char_exponents[l], char_exponents[0]);
    out.push_back(v);
  }
  return out;
}

std::string BranchType::str() const {
  std::ostringstream os;
  os << "(";
  for (size_t k = 0; k < char_exponents.size(); ++k) {
    if (k) os << ",";
    os << char_exponents[k];
  }
  os << ")";
  return os.str();
}

BranchType branch_type_from_exponents(std::vector<long> beta) {
  if (beta.empty()) beta.push_back(1);
  BranchType t;
  t.char_exponents = beta;
  long d = beta[0];
  for (size_t l = 1; l < beta.size(); ++l) {
    if (beta[l] <= beta[l - 1]) throw scalar_error("char exponents must increase");
    long d2 = std::gcd(d, beta[l]);
    if (d2 == d) throw scalar_error("non-characteristic exponent in list");
    // pair (m_l, n_l): beta_l / beta_0 = m_l / (n_1...n_l) in lowest terms over the chain
    t.puiseux_pairs.emplace_back(beta[l] / d2, d / d2);
    d = d2;
  }
  if (d != 1) throw scalar_error("gcd chain of char exponents does not reach 1");
  // normalize pairs: (m_l, n_l) with gcd(m_l, n_l) = 1 and beta_l/beta_0 = m_l/(n_1..n_l):
  // recompute m_l from the running product
  t.puiseux_pairs.clear();
  long prod = 1;
  d = beta[0];
  for (size_t l = 1; l < beta.size(); ++l) {
    long d2 = std::gcd(d, beta[l]);
    long n_l = d / d2;
    prod *= n_l;
    // beta_l / beta_0 = m_l / (n_1 ... n_l)
    Rat v(beta[l] * prod, beta[0]);
    v.canonicalize();
    t.puiseux_pairs.emplace_back(to_long(num(v)), n_l);
    d = d2;
  }
  return t;
}

BranchType branch_type(const PuiseuxBranch& b) {
  std::vector<long> beta{b.ram};
  long d = b.ram;
  for (const auto& [s, a] : b.coeffs) {
    if (d == 1) break;
    long d2 = std::gcd(d, s);
    if (d2 < d) {
      // a characteristic coefficient must be certifiably nonzero
      if (!certified_nonzero(a))
        throw scalar_error("characteristic coefficient is zero");
      beta.push_back(s);
      d = d2;
    }
  }
  if (d != 1) throw scalar_error("unresolved branch: gcd chain incomplete");
  return branch_type_from_exponents(std::move(beta));
}

std::string EquisType::str() const { return emit_equis(*this); }

namespace {

// lattice denominator of branch i strictly below exponent value e
long lattice_below(const BranchType& t, const Rat& e) {
  long q = 1;
  for (const Rat& v : t.exponent_values())
    if (v < e) q = std::lcm(q, den_l(v));
  return q;
}

}  // namespace

void validate_equis(const EquisType& e) {
  size_t r = e.size();
  if (e.coinc.size() != r) throw scalar_error("coincidence matrix size mismatch");
  for (size_t i = 0; i < r; ++i) {
    if (e.coinc[i].size() != r) throw scalar_error("coincidence matrix size mismatch");
    for (size_t j = i + 1; j < r; ++j) {
      if (e.coinc[i][j] != e.coinc[j][i]) throw scalar_error("coincidence matrix not symmetric");
      Rat c = e.coinc[i][j];
      if (c <= 0) throw scalar_error("coincidence must be positive");
      // admissibility: denominator must fit at least one branch's lattice at c
      long qi = lattice_below(e.branches[i], c);
      long qj = lattice_below(e.branches[j], c);
      long dc = den_l(c);
      bool oki = std::lcm(qi, dc) == qi || dc == 1;
      bool okj = std::lcm(qj, dc) == qj || dc == 1;
      // also allow c to be a characteristic exponent value of either branch
      for (const Rat& v : e.branches[i].exponent_values())
        if (v == c) oki = true;
      for (const Rat& v : e.branches[j].exponent_values())
        if (v == c) okj = true;
      if (!oki && !okj)
        throw scalar_error("inadmissible coincidence " + to_string(c) + " between branches " +
                           std::to_string(i) + "," + std::to_string(j));
      // shared prefix: char exponent values below c must agree
      std::vector<Rat> vi, vj;
      for (const Rat& v : e.branches[i].exponent_values())
        if (v < c) vi.push_back(v);
      for (const Rat& v : e.branches[j].exponent_values())
        if (v < c) vj.push_back(v);
      if (vi != vj)
        throw scalar_error("branches " + std::to_string(i) + "," + std::to_string(j) +
                           " disagree on characteristic exponents below their coincidence");
    }
  }
  // ultrametric: the two smallest of each triple coincide
  for (size_t i = 0; i < r; ++i)
    for (size_t j = i + 1; j < r; ++j)
      for (size_t k = j + 1; k < r; ++k) {
        Rat a = e.coinc[i][j], b = e.coinc[i][k], c = e.coinc[j][k];
        std::vector<Rat> v{a, b, c};
        std::sort(v.begin(), v.end());
        if (v[0] != v[1])
          throw scalar_error("ultrametric violation on triple " + std::to_string(i) + "," +
                             std::to_string(j) + "," + std::to_string(k));
      }
}

EquisType equisingularity_type(const ExpandResult& r) {
  EquisType e;
  for (const auto& b : r.branches) e.branches.push_back(branch_type(b));
  e.coinc = r.coincidence;
  validate_equis(e);
  return e;
}

EquisType equisingularity_type(const std::vector<PuiseuxBranch>& branches) {
  EquisType e;
  size_t n = branches.size();
  for (const auto& b : branches) e.branches.push_back(branch_type(b));
  e.coinc.assign(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      e.coinc[i][j] = e.coinc[j][i] = coincidence(branches[i], branches[j]);
  validate_equis(e);
  return e;
}

std::vector<long> semigroup_generators(const BranchType& t) {
  const auto& beta = t.char_exponents;
  std::vector<long> bar{beta[0]};
  if (beta.size() > 1) bar.push_back(beta[1]);
  for (size_t q = 1; q + 1 < beta.size(); ++q) {
    long n_q = t.puiseux_pairs[q - 1].second;
    bar.push_back(n_q * bar[q] + beta[q + 1] - beta[q]);
  }
  return bar;
}

long intersection_multiplicity(const BranchType& gamma, long delta_m0, const Rat& coinc) {
  const auto& beta = gamma.char_exponents;
  Rat alpha = coinc * Rat(beta[0]);
  // find q with beta_q <= alpha < beta_{q+1}
  size_t q = 0;
  for (size_t l = 1; l < beta.size(); ++l)
    if (Rat(beta[l]) <= alpha) q = l;
  auto bar = semigroup_generators(gamma);
  long prod_prev = 1, prod_q = 1;  // n_1..n_{q-1}, n_1..n_q
  for (size_t l = 0; l + 1 <= q; ++l) {
    if (l + 1 < q) prod_prev *= gamma.puiseux_pairs[l].second;
    prod_q *= gamma.puiseux_pairs[l].second;
  }
  Rat val = rq(bar[q], prod_prev) + (alpha - Rat(beta[q])) / Rat(prod_q);
  Rat total = Rat(delta_m0) * val;
  if (!is_integer(total) || total <= 0)
    throw scalar_error("inadmissible coincidence for intersection multiplicity: alpha=" +
                       to_string(alpha));
  return to_long(num(total));
}

std::string emit_equis(const EquisType& e) {
  std::ostringstream os;
  os << "branches " << e.size() << "\n";
  for (size_t i = 0; i < e.size(); ++i) {
    os << "branch";
    for (long b : e.branches[i].char_exponents) os << " " << b;
    os << "\n";
  }
  for (size_t i = 0; i < e.size(); ++i)
    for (size_t j = i + 1; j < e.size(); ++j)
      os << "coincidence " << i << " " << j << " " << to_string(e.coinc[i][j]) << "\n";
  return os.str();
}

EquisType parse_equis(const std::string& text) {
  EquisType e;
  std::istringstream is(text);
  std::string tok;
  size_t n = 0;
  while (is >> tok) {
    if (tok == "#") {
      std::string line;
      std::getline(is, line);
    } else if (tok == "branches") {
      is >> n;
    } else if (tok == "branch") {
      std::string line;
      std::getline(is, line);
      std::istringstream ls(line);
      std::vector<long> beta;
      long v;
      while (ls >> v) beta.push_back(v);
      e.branches.push_back(branch_type_from_exponents(std::move(beta)));
    } else if (tok == "coincidence") {
      if (e.coinc.empty()) e.coinc.assign(e.size(), std::vector<Rat>(e.size(), Rat(0)));
      size_t i, j;
      std::string val;
      is >> i >> j >> val;
      e.coinc[i][j] = e.coinc[j][i] = parse_rat(val);
    } else {
      throw scalar_error("bad equis token: " + tok);
    }
  }
  if (e.coinc.empty()) e.coinc.assign(e.size(), std::vector<Rat>(e.size(), Rat(0)));
  if (n != e.size()) throw scalar_error("equis branch count mismatch");
  validate_equis(e);
  return e;
}

}  // namespace polar
