#pragma once

#include <climits>
#include <stdexcept>
#include <string>
#include <vector>

#include "polynomial.hpp"
#include "rational.hpp"

namespace bubbletree {

// Free graded module: deg[i] is the degree of the i-th generator, i.e. the
// module is the direct sum of R(-deg[i]) (generator i lives in degree deg[i],
// the twisted sheaf is O(-deg[i])).
struct FreeModule {
  RingPtr R;
  std::vector<long> deg;

  FreeModule() = default;
  FreeModule(RingPtr ring, std::vector<long> degrees) : R(std::move(ring)), deg(std::move(degrees)) {}
  static FreeModule trivial(RingPtr ring, int rank) {
    return FreeModule(std::move(ring), std::vector<long>(rank, 0));
  }
  int rank() const { return static_cast<int>(deg.size()); }
  long c1() const {
    long s = 0;
    for (long d : deg) s -= d;
    return s;
  }
};

template <class K>
struct ModTerm {
  Monomial m;
  int pos;
  K c;
  friend bool operator==(const ModTerm& a, const ModTerm& b) {
    return a.pos == b.pos && a.m == b.m && a.c == b.c;
  }
};

// Module term order: an optional dominant block of positions [0, block_split)
// for elimination, then term-over-position under the ring order, then lower
// position wins ties.
struct ModOrder {
  const RingDesc* R = nullptr;
  int block_split = INT_MAX;

  template <class K>
  int compare(const ModTerm<K>& a, const ModTerm<K>& b) const {
    int ba = a.pos < block_split ? 0 : 1;
    int bb = b.pos < block_split ? 0 : 1;
    if (ba != bb) return ba < bb ? 1 : -1;
    int c = R->order.compare(a.m, b.m);
    if (c != 0) return c;
    if (a.pos != b.pos) return a.pos < b.pos ? 1 : -1;
    return 0;
  }
};

// Element of a free module, terms sorted descending under a ModOrder.
template <class K>
struct Vec {
  std::vector<ModTerm<K>> t;

  bool is_zero() const { return t.empty(); }
  const ModTerm<K>& lead() const { return t.front(); }
  friend bool operator==(const Vec& a, const Vec& b) { return a.t == b.t; }
  friend bool operator!=(const Vec& a, const Vec& b) { return !(a == b); }
};

template <class K>
Vec<K> vec_unit(const RingPtr& R, int pos) {
  Vec<K> v;
  v.t.push_back({Monomial(R->nvars()), pos, K(1)});
  return v;
}

template <class K>
void vec_sort(Vec<K>& v, const ModOrder& ord) {
  std::sort(v.t.begin(), v.t.end(),
            [&](const ModTerm<K>& a, const ModTerm<K>& b) { return ord.compare(a, b) > 0; });
  // merge duplicates
  std::vector<ModTerm<K>> out;
  for (auto& term : v.t) {
    if (!out.empty() && out.back().pos == term.pos && out.back().m == term.m) {
      out.back().c = out.back().c + term.c;
      if (out.back().c.is_zero()) out.pop_back();
    } else if (!term.c.is_zero()) {
      out.push_back(term);
    }
  }
  v.t = std::move(out);
}

template <class K>
Vec<K> vec_add(const Vec<K>& a, const Vec<K>& b, const ModOrder& ord) {
  Vec<K> r;
  size_t i = 0, j = 0;
  while (i < a.t.size() || j < b.t.size()) {
    if (j == b.t.size() || (i < a.t.size() && ord.compare(a.t[i], b.t[j]) > 0)) {
      r.t.push_back(a.t[i++]);
    } else if (i == a.t.size() || ord.compare(a.t[i], b.t[j]) < 0) {
      r.t.push_back(b.t[j++]);
    } else {
      K c = a.t[i].c + b.t[j].c;
      if (!c.is_zero()) r.t.push_back({a.t[i].m, a.t[i].pos, c});
      ++i;
      ++j;
    }
  }
  return r;
}

template <class K>
Vec<K> vec_mul_term(const Vec<K>& v, const Monomial& m, const K& c) {
  Vec<K> r;
  if (c.is_zero()) return r;
  r.t.reserve(v.t.size());
  for (const auto& term : v.t) r.t.push_back({term.m * m, term.pos, term.c * c});
  return r;
}

template <class K>
Vec<K> vec_neg(const Vec<K>& v) {
  Vec<K> r = v;
  for (auto& term : r.t) term.c = -term.c;
  return r;
}

template <class K>
Vec<K> vec_mul_poly(const Vec<K>& v, const Poly<K>& p, const ModOrder& ord) {
  Vec<K> r;
  for (const auto& [m, c] : p.terms()) r = vec_add(r, vec_mul_term(v, m, c), ord);
  return r;
}

// Scale to canonical form: over QQ primitive integer coefficients with
// positive lead, over other fields monic.
template <class K>
void vec_make_primitive(Vec<K>& v) {
  if (v.t.empty()) return;
  if constexpr (std::is_same_v<K, Rational>) {
    BigInt den(1), num(0);
    for (const auto& term : v.t) den = den * (term.c.den() / BigInt::gcd(den, term.c.den()));
    for (const auto& term : v.t) num = BigInt::gcd(num, term.c.num() * (den / term.c.den()));
    Rational scale(den, num);
    if (v.t.front().c.sign() < 0) scale = -scale;
    for (auto& term : v.t) term.c = term.c * scale;
  } else {
    K inv = v.t.front().c.inv();
    for (auto& term : v.t) term.c = term.c * inv;
  }
}

template <class K>
void vec_make_monic(Vec<K>& v) {
  if (v.t.empty()) return;
  K inv = v.t.front().c.inv();
  for (auto& term : v.t) term.c = term.c * inv;
}

// Degree of a homogeneous vector in a graded free module.
template <class K>
long vec_degree(const Vec<K>& v, const FreeModule& F) {
  if (v.t.empty()) return 0;
  long d = F.R->weight_of(v.t.front().m) + F.deg[v.t.front().pos];
  for (const auto& term : v.t)
    if (F.R->weight_of(term.m) + F.deg[term.pos] != d)
      throw std::logic_error("vec: not homogeneous");
  return d;
}

template <class K>
bool vec_is_homogeneous(const Vec<K>& v, const FreeModule& F) {
  if (v.t.empty()) return true;
  long d = F.R->weight_of(v.t.front().m) + F.deg[v.t.front().pos];
  for (const auto& term : v.t)
    if (F.R->weight_of(term.m) + F.deg[term.pos] != d) return false;
  return true;
}

// Finitely presented (graded) module: cokernel of the map whose columns are
// `rel` inside the free module F.
template <class K>
struct Module {
  FreeModule F;
  std::vector<Vec<K>> rel;

  int ngens() const { return F.rank(); }
  int nrels() const { return static_cast<int>(rel.size()); }
};

template <class K>
std::string vec_to_string(const Vec<K>& v, const RingDesc& R) {
  if (v.t.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < v.t.size(); ++i) {
    const auto& term = v.t[i];
    std::string cs = term.c.to_string();
    bool neg = !cs.empty() && cs[0] == '-';
    if (i == 0) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    if (neg) cs = cs.substr(1);
    if (cs != "1" || term.m.is_one()) s += cs;
    if (!term.m.is_one()) {
      if (cs != "1") s += "*";
      s += monomial_to_string(R, term.m);
    }
    s += "<" + std::to_string(term.pos) + ">";
  }
  return s;
}

// Polynomial matrix, row major; columns present relations.
template <class K>
struct PolyMatrix {
  RingPtr R;
  int rows = 0, cols = 0;
  std::vector<Poly<K>> a;

  PolyMatrix() = default;
  PolyMatrix(RingPtr ring, int r, int c)
      : R(std::move(ring)), rows(r), cols(c), a(static_cast<size_t>(r) * c, Poly<K>::zero(R)) {
    for (auto& p : a) p = Poly<K>::zero(R);
  }
  Poly<K>& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Poly<K>& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  Vec<K> column(int j, const ModOrder& ord) const {
    Vec<K> v;
    for (int i = 0; i < rows; ++i)
      for (const auto& [m, c] : at(i, j).terms()) v.t.push_back({m, i, c});
    vec_sort(v, ord);
    return v;
  }
};

template <class K>
PolyMatrix<K> columns_to_matrix(const RingPtr& R, int rows, const std::vector<Vec<K>>& cols) {
  PolyMatrix<K> M(R, rows, static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (const auto& term : cols[j].t)
      M.at(term.pos, static_cast<int>(j)) =
          M.at(term.pos, static_cast<int>(j)) + Poly<K>::term(R, term.m, term.c);
  return M;
}

}  // namespace bubbletree
