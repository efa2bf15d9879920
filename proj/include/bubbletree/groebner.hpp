#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "module.hpp"

namespace bubbletree {

// Reduced Groebner basis of a submodule of a free module, together with the
// order it was computed under. Deterministic given the order: basis is
// auto-reduced, canonically scaled, sorted descending by leading term.
template <class K>
struct GBasis {
  ModOrder ord;
  std::vector<Vec<K>> g;
};

namespace detail {

// Full reduction of v by basis; if combo != nullptr it receives, per basis
// element, the multiplier used, so v = result + sum_i combo_i * basis[i].
template <class K>
Vec<K> reduce_full(Vec<K> v, const std::vector<Vec<K>>& basis, const ModOrder& ord,
                   std::vector<Poly<K>>* combo = nullptr, RingPtr R = {}) {
  Vec<K> done;
  while (!v.is_zero()) {
    const ModTerm<K>& t = v.t.front();
    bool reduced = false;
    for (size_t gi = 0; gi < basis.size(); ++gi) {
      const Vec<K>& g = basis[gi];
      if (g.is_zero()) continue;
      const ModTerm<K>& lt = g.lead();
      if (lt.pos == t.pos && lt.m.divides(t.m)) {
        Monomial q = t.m / lt.m;
        K c = t.c / lt.c;
        v = vec_add(v, vec_mul_term(vec_neg(g), q, c), ord);
        if (combo) (*combo)[gi] = (*combo)[gi] + Poly<K>::term(R, q, c);
        reduced = true;
        break;
      }
    }
    if (!reduced) {
      done.t.push_back(t);
      v.t.erase(v.t.begin());
    }
  }
  return done;
}

template <class K>
void canonical_scale(Vec<K>& v) {
  vec_make_primitive(v);
}

struct Pair {
  int i, j;
  long deg;
};

}  // namespace detail

// Buchberger with the product criterion (single-component elements only,
// where it is valid) and the chain criterion for modules. S-pairs are
// processed degree by degree with (degree, pair index) tie-breaking.
template <class K>
GBasis<K> groebner_basis(const RingPtr& R, std::vector<Vec<K>> gens, const ModOrder& ord) {
  std::vector<Vec<K>> basis;
  for (auto& v : gens) {
    vec_sort(v, ord);
    if (!v.is_zero()) {
      detail::canonical_scale(v);
      basis.push_back(std::move(v));
    }
  }

  auto single_component = [](const Vec<K>& v) {
    for (const auto& t : v.t)
      if (t.pos != v.lead().pos) return false;
    return true;
  };

  std::vector<detail::Pair> queue;
  std::vector<std::vector<char>> handled;
  auto mark = [&](int i, int j) {
    handled[std::max(i, j)][std::min(i, j)] = 1;
  };
  auto is_handled = [&](int i, int j) {
    return handled[std::max(i, j)][std::min(i, j)] != 0;
  };
  auto push_pairs_for = [&](int n) {
    handled.emplace_back(n, 0);
    for (int i = 0; i < n; ++i) {
      if (basis[i].lead().pos != basis[n].lead().pos) continue;
      Monomial l = Monomial::lcm(basis[i].lead().m, basis[n].lead().m);
      queue.push_back({i, n, static_cast<long>(l.total_degree())});
    }
  };
  for (size_t n = 0; n < basis.size(); ++n) push_pairs_for(static_cast<int>(n));

  while (!queue.empty()) {
    size_t best = 0;
    for (size_t k = 1; k < queue.size(); ++k) {
      const auto& a = queue[k];
      const auto& b = queue[best];
      if (a.deg != b.deg ? a.deg < b.deg : (a.j != b.j ? a.j < b.j : a.i < b.i)) best = k;
    }
    detail::Pair p = queue[best];
    queue.erase(queue.begin() + best);
    mark(p.i, p.j);

    const Vec<K>& f = basis[p.i];
    const Vec<K>& g = basis[p.j];
    Monomial l = Monomial::lcm(f.lead().m, g.lead().m);

    if (f.lead().m.coprime(g.lead().m) && single_component(f) && single_component(g))
      continue;  // product criterion, valid in the embedded ideal case

    bool chained = false;
    for (size_t k = 0; k < basis.size(); ++k) {
      if (static_cast<int>(k) == p.i || static_cast<int>(k) == p.j) continue;
      if (basis[k].is_zero() || basis[k].lead().pos != f.lead().pos) continue;
      if (!basis[k].lead().m.divides(l)) continue;
      if (is_handled(p.i, static_cast<int>(k)) && is_handled(p.j, static_cast<int>(k))) {
        chained = true;
        break;
      }
    }
    if (chained) continue;

    Vec<K> s = vec_add(vec_mul_term(f, l / f.lead().m, g.lead().c),
                       vec_mul_term(vec_neg(g), l / g.lead().m, f.lead().c), ord);
    Vec<K> r = detail::reduce_full(std::move(s), basis, ord);
    if (!r.is_zero()) {
      detail::canonical_scale(r);
      basis.push_back(std::move(r));
      push_pairs_for(static_cast<int>(basis.size()) - 1);
    }
  }

  // inter-reduce: drop redundant leads, then tail-reduce
  std::vector<Vec<K>> kept;
  for (size_t i = 0; i < basis.size(); ++i) {
    bool redundant = false;
    for (size_t j = 0; j < basis.size(); ++j) {
      if (i == j) continue;
      const auto& li = basis[i].lead();
      const auto& lj = basis[j].lead();
      if (lj.pos == li.pos && lj.m.divides(li.m) && (lj.m != li.m || j < i)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) kept.push_back(basis[i]);
  }
  for (size_t i = 0; i < kept.size(); ++i) {
    std::vector<Vec<K>> others;
    for (size_t j = 0; j < kept.size(); ++j)
      if (j != i) others.push_back(kept[j]);
    kept[i] = detail::reduce_full(kept[i], others, ord);
    detail::canonical_scale(kept[i]);
  }
  std::sort(kept.begin(), kept.end(), [&](const Vec<K>& a, const Vec<K>& b) {
    return ord.compare(a.lead(), b.lead()) > 0;
  });

  GBasis<K> out;
  out.ord = ord;
  out.g = std::move(kept);
  return out;
}

template <class K>
ModOrder top_order(const RingPtr& R) {
  ModOrder o;
  o.R = R.get();
  return o;
}

template <class K>
GBasis<K> groebner_basis(const RingPtr& R, const std::vector<Vec<K>>& gens) {
  return groebner_basis(R, gens, top_order<K>(R));
}

template <class K>
Vec<K> normal_form(Vec<K> v, const GBasis<K>& gb) {
  vec_sort(v, gb.ord);
  return detail::reduce_full(std::move(v), gb.g, gb.ord);
}

template <class K>
bool in_span(const Vec<K>& v, const GBasis<K>& gb) {
  return normal_form(v, gb).is_zero();
}

// One elimination computation yielding: a Groebner basis of span(gens) in the
// ambient of the given rank, a lift of each basis element through the input
// generators, and generators of the syzygy module of `gens`.
template <class K>
struct SyzResult {
  GBasis<K> gb;                   // basis of span(gens), ambient rank r
  std::vector<Vec<K>> lifts;      // lifts[k] in R^m: gb.g[k] = sum_i lifts[k][i] * gens[i]
  std::vector<Vec<K>> syzygies;   // in R^m
  int m = 0;
};

template <class K>
SyzResult<K> groebner_with_syzygies(const RingPtr& R, const std::vector<Vec<K>>& gens, int rank) {
  int m = static_cast<int>(gens.size());
  ModOrder elim;
  elim.R = R.get();
  elim.block_split = rank;

  std::vector<Vec<K>> work;
  for (int i = 0; i < m; ++i) {
    Vec<K> h = gens[i];
    h.t.push_back({Monomial(R->nvars()), rank + i, K(1)});
    vec_sort(h, elim);
    work.push_back(std::move(h));
  }
  GBasis<K> big = groebner_basis(R, work, elim);

  SyzResult<K> out;
  out.m = m;
  out.gb.ord = top_order<K>(R);
  for (const auto& w : big.g) {
    Vec<K> fpart, cpart;
    for (const auto& t : w.t)
      (t.pos < rank ? fpart : cpart).t.push_back(t);
    for (auto& t : cpart.t) t.pos -= rank;
    if (fpart.is_zero()) {
      vec_sort(cpart, out.gb.ord);
      detail::canonical_scale(cpart);
      out.syzygies.push_back(std::move(cpart));
    } else {
      vec_sort(fpart, out.gb.ord);
      vec_sort(cpart, out.gb.ord);
      out.gb.g.push_back(std::move(fpart));
      out.lifts.push_back(std::move(cpart));
    }
  }
  return out;
}

// Syzygy generators of `gens` inside the free module of the given rank.
template <class K>
std::vector<Vec<K>> syzygies(const RingPtr& R, const std::vector<Vec<K>>& gens, int rank) {
  return groebner_with_syzygies(R, gens, rank).syzygies;
}

// Express v as a combination of gens (if possible): returns coefficients in
// R^m with v = sum coeff_i * gens_i, or nullopt when v is not in the span.
template <class K>
std::optional<Vec<K>> express_in(const Vec<K>& v, const SyzResult<K>& S,
                                 const RingPtr& R) {
  std::vector<Poly<K>> combo(S.gb.g.size(), Poly<K>::zero(R));
  Vec<K> sorted = v;
  vec_sort(sorted, S.gb.ord);
  Vec<K> r = detail::reduce_full(std::move(sorted), S.gb.g, S.gb.ord, &combo, R);
  if (!r.is_zero()) return std::nullopt;
  ModOrder ord = S.gb.ord;
  Vec<K> lift;
  for (size_t k = 0; k < combo.size(); ++k)
    lift = vec_add(lift, vec_mul_poly(S.lifts[k], combo[k], ord), ord);
  return lift;
}

}  // namespace bubbletree
