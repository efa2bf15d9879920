#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "groebner.hpp"

namespace bubbletree {

struct LengthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class K>
Vec<K> apply_matrix(const PolyMatrix<K>& Phi, const Vec<K>& v, const ModOrder& ord) {
  Vec<K> r;
  for (const auto& term : v.t) {
    for (int row = 0; row < Phi.rows; ++row) {
      const Poly<K>& p = Phi.at(row, term.pos);
      if (p.is_zero()) continue;
      Vec<K> contrib;
      for (const auto& [m, c] : p.terms()) contrib.t.push_back({m * term.m, row, c * term.c});
      vec_sort(contrib, ord);
      r = vec_add(r, contrib, ord);
    }
  }
  return r;
}

template <class K>
PolyMatrix<K> transpose(const PolyMatrix<K>& A) {
  PolyMatrix<K> T(A.R, A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return T;
}

template <class K>
PolyMatrix<K> rel_matrix(const Module<K>& M) {
  return columns_to_matrix(M.F.R, M.F.rank(), M.rel);
}

template <class K>
GBasis<K> module_gb(const Module<K>& M) {
  return groebner_basis(M.F.R, M.rel);
}

template <class K>
bool is_zero_module(const Module<K>& M) {
  GBasis<K> gb = module_gb(M);
  for (int i = 0; i < M.F.rank(); ++i)
    if (!in_span(vec_unit<K>(M.F.R, i), gb)) return false;
  return true;
}

template <class K>
bool spans_equal(const RingPtr& R, const std::vector<Vec<K>>& A, const std::vector<Vec<K>>& B) {
  GBasis<K> ga = groebner_basis(R, A);
  GBasis<K> gb = groebner_basis(R, B);
  return ga.g == gb.g;
}

// Degrees of a list of homogeneous vectors in ambient F (zeros when the ring
// is ungraded).
template <class K>
std::vector<long> vec_degrees(const std::vector<Vec<K>>& v, const FreeModule& F) {
  std::vector<long> d;
  d.reserve(v.size());
  for (const auto& x : v) d.push_back(F.R->graded ? vec_degree(x, F) : 0L);
  return d;
}

// Present span(gens)/span(denom) inside the ambient free module.
template <class K>
Module<K> present_subquotient(const FreeModule& amb, const std::vector<Vec<K>>& gens,
                              const std::vector<Vec<K>>& denom) {
  std::vector<Vec<K>> all = gens;
  all.insert(all.end(), denom.begin(), denom.end());
  std::vector<Vec<K>> syz = syzygies(amb.R, all, amb.rank());
  Module<K> out;
  out.F = FreeModule(amb.R, vec_degrees(gens, amb));
  for (const auto& s : syz) {
    Vec<K> head;
    for (const auto& t : s.t)
      if (t.pos < static_cast<int>(gens.size())) head.t.push_back(t);
    if (!head.is_zero()) {
      vec_sort(head, top_order<K>(amb.R));
      vec_make_primitive(head);
      out.rel.push_back(std::move(head));
    }
  }
  // dedupe
  GBasis<K> g = groebner_basis(amb.R, out.rel);
  out.rel = g.g;
  return out;
}

template <class K>
struct KernelResult {
  Module<K> ker;               // presentation of ker(f)
  std::vector<Vec<K>> gens;    // kernel generators inside the source ambient
};

// Kernel of the map coker(M) -> coker(N) induced by Phi on ambient frees.
template <class K>
KernelResult<K> kernel_of_map(const Module<K>& M, const Module<K>& N, const PolyMatrix<K>& Phi) {
  const RingPtr& R = M.F.R;
  ModOrder ord = top_order<K>(R);
  // well-definedness: Phi carries relations of M into relations of N
  GBasis<K> ngb = module_gb(N);
  for (const auto& col : M.rel)
    if (!in_span(apply_matrix(Phi, col, ord), ngb))
      throw std::invalid_argument("kernel_of_map: matrix does not define a map of cokernels");

  // preimage of span(N.rel): syzygies of [Phi(e_i) | N.rel]
  std::vector<Vec<K>> stacked;
  for (int i = 0; i < M.F.rank(); ++i) stacked.push_back(apply_matrix(Phi, vec_unit<K>(R, i), ord));
  stacked.insert(stacked.end(), N.rel.begin(), N.rel.end());
  std::vector<Vec<K>> syz = syzygies(R, stacked, N.F.rank());

  std::vector<Vec<K>> pre;
  for (const auto& s : syz) {
    Vec<K> head;
    for (const auto& t : s.t)
      if (t.pos < M.F.rank()) head.t.push_back(t);
    if (!head.is_zero()) {
      vec_sort(head, ord);
      vec_make_primitive(head);
      pre.push_back(std::move(head));
    }
  }
  GBasis<K> pregb = groebner_basis(R, pre);
  pre = pregb.g;

  KernelResult<K> out;
  out.gens = pre;
  out.ker = present_subquotient(M.F, pre, M.rel);
  return out;
}

// Intersection of two submodules of the ambient free module.
template <class K>
std::vector<Vec<K>> intersect_submodules(const FreeModule& amb, const std::vector<Vec<K>>& A,
                                         const std::vector<Vec<K>>& B) {
  std::vector<Vec<K>> all = A;
  all.insert(all.end(), B.begin(), B.end());
  std::vector<Vec<K>> syz = syzygies(amb.R, all, amb.rank());
  ModOrder ord = top_order<K>(amb.R);
  std::vector<Vec<K>> out;
  for (const auto& s : syz) {
    Vec<K> w;
    for (const auto& t : s.t) {
      if (t.pos >= static_cast<int>(A.size())) continue;
      Vec<K> contrib = vec_mul_term(A[t.pos], t.m, t.c);
      w = vec_add(w, contrib, ord);
    }
    if (!w.is_zero()) {
      vec_make_primitive(w);
      out.push_back(std::move(w));
    }
  }
  GBasis<K> g = groebner_basis(amb.R, out);
  return g.g;
}

// Module colon (N : f) inside the ambient free module.
template <class K>
std::vector<Vec<K>> colon_element(const FreeModule& amb, const std::vector<Vec<K>>& N,
                                  const Poly<K>& f) {
  ModOrder ord = top_order<K>(amb.R);
  std::vector<Vec<K>> fF;
  for (int i = 0; i < amb.rank(); ++i) fF.push_back(vec_mul_poly(vec_unit<K>(amb.R, i), f, ord));
  std::vector<Vec<K>> cap = intersect_submodules(amb, N, fF);
  std::vector<Vec<K>> out;
  for (const auto& w : cap) {
    PolyMatrix<K> col = columns_to_matrix(amb.R, amb.rank(), std::vector<Vec<K>>{w});
    Vec<K> v;
    for (int i = 0; i < amb.rank(); ++i) {
      if (col.at(i, 0).is_zero()) continue;
      Poly<K> q = col.at(i, 0).divide_exact(f);
      for (const auto& [m, c] : q.terms()) v.t.push_back({m, i, c});
    }
    vec_sort(v, ord);
    if (!v.is_zero()) {
      vec_make_primitive(v);
      out.push_back(std::move(v));
    }
  }
  GBasis<K> g = groebner_basis(amb.R, out);
  return g.g;
}

template <class K>
std::vector<Vec<K>> colon_ideal(const FreeModule& amb, const std::vector<Vec<K>>& N,
                                const std::vector<Poly<K>>& J) {
  std::vector<Vec<K>> acc;
  bool first = true;
  for (const auto& f : J) {
    if (f.is_zero()) continue;
    std::vector<Vec<K>> c = colon_element(amb, N, f);
    if (first) {
      acc = c;
      first = false;
    } else {
      acc = intersect_submodules(amb, acc, c);
    }
  }
  if (first) throw std::invalid_argument("colon_ideal: zero ideal");
  return acc;
}

// Saturation (N : J^infty) inside the ambient free module; idempotent.
template <class K>
std::vector<Vec<K>> saturate_submodule(const FreeModule& amb, std::vector<Vec<K>> N,
                                       const std::vector<Poly<K>>& J) {
  GBasis<K> cur = groebner_basis(amb.R, N);
  while (true) {
    std::vector<Vec<K>> next = colon_ideal(amb, cur.g, J);
    GBasis<K> ng = groebner_basis(amb.R, next);
    if (ng.g == cur.g) return cur.g;
    cur = std::move(ng);
  }
}

// ---------------------------------------------------------------------------
// length / colength

// Leading-term data per ambient position.
template <class K>
struct LeadCone {
  std::vector<std::vector<Monomial>> leads;  // per position
};

template <class K>
LeadCone<K> lead_cone(const GBasis<K>& gb, int rank) {
  LeadCone<K> c;
  c.leads.resize(rank);
  for (const auto& g : gb.g) c.leads[g.lead().pos].push_back(g.lead().m);
  return c;
}

inline bool divisible_by_any(const Monomial& m, const std::vector<Monomial>& leads) {
  for (const auto& l : leads)
    if (l.divides(m)) return true;
  return false;
}

// Standard (monomial, position) pairs of the cokernel; throws LengthError if
// infinite (a pure variable power is missing from the leading-term cone).
template <class K>
std::vector<std::pair<Monomial, int>> standard_pairs(const Module<K>& M, const GBasis<K>& gb) {
  size_t nv = M.F.R->nvars();
  LeadCone<K> cone = lead_cone(gb, M.F.rank());
  std::vector<std::pair<Monomial, int>> out;
  for (int pos = 0; pos < M.F.rank(); ++pos) {
    std::vector<int> bound(nv, -1);
    for (size_t j = 0; j < nv; ++j) {
      for (const auto& l : cone.leads[pos]) {
        bool pure = true;
        for (size_t k = 0; k < nv; ++k)
          if (k != j && l.e[k] > 0) pure = false;
        if (pure) {
          int e = l.e[j];
          if (bound[j] < 0 || e < bound[j]) bound[j] = e;
        }
      }
      if (bound[j] < 0)
        throw LengthError("not finite at point: leading-term ideal misses a power of " +
                          M.F.R->vars[j] + " in component " + std::to_string(pos));
    }
    // enumerate the box
    Monomial m(nv);
    std::function<void(size_t)> rec = [&](size_t j) {
      if (j == nv) {
        if (!divisible_by_any(m, cone.leads[pos])) out.emplace_back(m, pos);
        return;
      }
      for (int e = 0; e < std::max(bound[j], 1); ++e) {
        m.e[j] = e;
        rec(j + 1);
      }
      m.e[j] = 0;
    };
    rec(0);
  }
  return out;
}

// dim_k of the cokernel when finite.
template <class K>
long module_length(const Module<K>& M) {
  GBasis<K> gb = module_gb(M);
  return static_cast<long>(standard_pairs(M, gb).size());
}

// Multiplication matrices of each variable on the standard basis.
template <class K>
std::vector<std::vector<std::vector<K>>> multiplication_matrices(const Module<K>& M,
                                                                 const GBasis<K>& gb,
                                                                 const std::vector<std::pair<Monomial, int>>& basis) {
  size_t nv = M.F.R->nvars();
  size_t D = basis.size();
  std::map<std::pair<std::vector<int>, int>, size_t> index;
  for (size_t k = 0; k < D; ++k) index[{basis[k].first.e, basis[k].second}] = k;
  std::vector<std::vector<std::vector<K>>> mats(nv, std::vector<std::vector<K>>(D, std::vector<K>(D, K(0))));
  for (size_t j = 0; j < nv; ++j) {
    for (size_t k = 0; k < D; ++k) {
      Vec<K> v;
      Monomial m = basis[k].first;
      m.e[j] += 1;
      v.t.push_back({m, basis[k].second, K(1)});
      Vec<K> nf = normal_form(v, gb);
      for (const auto& t : nf.t) {
        auto it = index.find({t.m.e, t.pos});
        if (it == index.end()) throw std::logic_error("multiplication matrix: NF not standard");
        mats[j][it->second][k] = t.c;
      }
    }
  }
  return mats;
}

template <class K>
bool matrices_nilpotent(std::vector<std::vector<std::vector<K>>>& mats) {
  for (auto& N : mats) {
    size_t D = N.size();
    if (D == 0) continue;
    auto mul = [D](const std::vector<std::vector<K>>& A, const std::vector<std::vector<K>>& B) {
      std::vector<std::vector<K>> C(D, std::vector<K>(D, K(0)));
      for (size_t i = 0; i < D; ++i)
        for (size_t k = 0; k < D; ++k) {
          if (A[i][k].is_zero()) continue;
          for (size_t j = 0; j < D; ++j)
            if (!B[k][j].is_zero()) C[i][j] = C[i][j] + A[i][k] * B[k][j];
        }
      return C;
    };
    std::vector<std::vector<K>> P = N;
    size_t pw = 1;
    while (pw < D) {
      P = mul(P, P);
      pw *= 2;
    }
    for (size_t i = 0; i < D; ++i)
      for (size_t j = 0; j < D; ++j)
        if (!P[i][j].is_zero()) return false;
  }
  return true;
}

// Length of the cokernel; with at_origin set, additionally certifies that the
// support is exactly the origin (all multiplication operators nilpotent).
template <class K>
long module_length_at_origin(const Module<K>& M, bool at_origin) {
  GBasis<K> gb = module_gb(M);
  auto basis = standard_pairs(M, gb);
  if (at_origin && !basis.empty()) {
    auto mats = multiplication_matrices(M, gb, basis);
    if (!matrices_nilpotent(mats))
      throw LengthError("support not contained in the origin");
  }
  return static_cast<long>(basis.size());
}

// Length of the cokernel localized at the origin, valid even when the module
// has support elsewhere: dim of M/(vars)^N M stabilized over N.
template <class K>
long local_length_at_origin(const Module<K>& M) {
  const RingPtr& R = M.F.R;
  long prev = -1;
  for (int N = 1; N <= 40; ++N) {
    Module<K> q = M;
    // append (vars)^N * generators
    std::vector<Monomial> monos;
    Monomial m(R->nvars());
    std::function<void(size_t, int)> rec = [&](size_t j, int left) {
      if (j + 1 == R->nvars()) {
        m.e[j] = left;
        monos.push_back(m);
        return;
      }
      for (int e = 0; e <= left; ++e) {
        m.e[j] = e;
        rec(j + 1, left - e);
      }
      m.e[j] = 0;
    };
    rec(0, N);
    for (int pos = 0; pos < M.F.rank(); ++pos)
      for (const auto& mm : monos) {
        Vec<K> v;
        v.t.push_back({mm, pos, K(1)});
        q.rel.push_back(v);
      }
    long len = module_length(q);
    if (len == prev) return len;
    prev = len;
  }
  throw LengthError("local length did not stabilize");
}

// ---------------------------------------------------------------------------
// dual / bidual / torsion

template <class K>
struct DualResult {
  Module<K> D;                 // presentation of Hom(M, R)
  FreeModule ambient;          // (F0)^* = R^{r0} with negated degrees
  std::vector<Vec<K>> phis;    // generators of Hom(M,R) as row vectors in ambient
};

template <class K>
DualResult<K> dual_module(const Module<K>& M) {
  const RingPtr& R = M.F.R;
  DualResult<K> out;
  std::vector<long> ndeg;
  for (long d : M.F.deg) ndeg.push_back(-d);
  out.ambient = FreeModule(R, ndeg);

  // phi with phi . rel = 0  <=>  phi in kernel of transpose map
  int s = static_cast<int>(M.rel.size());
  PolyMatrix<K> A = rel_matrix(M);
  ModOrder ord = top_order<K>(R);
  std::vector<Vec<K>> tcols;
  for (int i = 0; i < M.F.rank(); ++i) {
    Vec<K> col;
    for (int j = 0; j < s; ++j)
      for (const auto& [m, c] : A.at(i, j).terms()) col.t.push_back({m, j, c});
    vec_sort(col, ord);
    tcols.push_back(std::move(col));
  }
  out.phis = syzygies(R, tcols, s);
  GBasis<K> g = groebner_basis(R, out.phis);
  out.phis = g.g;
  out.D = present_subquotient(out.ambient, out.phis, {});
  return out;
}

template <class K>
struct BidualResult {
  Module<K> dd;                    // presentation of M**
  FreeModule ambient;              // free module containing M** as a saturated submodule
  std::vector<Vec<K>> dd_gens;     // generators of M** inside ambient
  std::vector<Vec<K>> can_image;   // image of each generator of M in ambient
  PolyMatrix<K> can;               // canonical map: coords of can_image in dd_gens
};

template <class K>
BidualResult<K> bidual_module(const Module<K>& M) {
  const RingPtr& R = M.F.R;
  DualResult<K> d1 = dual_module(M);
  DualResult<K> d2 = dual_module(d1.D);

  BidualResult<K> out;
  out.ambient = d2.ambient;  // R^p, p = #phis
  out.dd_gens = d2.phis;
  out.dd = d2.D;

  ModOrder ord = top_order<K>(R);
  int p = static_cast<int>(d1.phis.size());
  PolyMatrix<K> phimat = columns_to_matrix(R, M.F.rank(), d1.phis);  // column k = phi_k
  out.can_image.clear();
  for (int i = 0; i < M.F.rank(); ++i) {
    Vec<K> ev;
    for (int k = 0; k < p; ++k) {
      const Poly<K>& val = phimat.at(i, k);  // phi_k(e_i)
      for (const auto& [m, c] : val.terms()) ev.t.push_back({m, k, c});
    }
    vec_sort(ev, ord);
    out.can_image.push_back(std::move(ev));
  }

  // express canonical images in the chosen generators of M**
  SyzResult<K> S = groebner_with_syzygies(R, out.dd_gens, p);
  out.can = PolyMatrix<K>(R, static_cast<int>(out.dd_gens.size()), M.F.rank());
  for (int i = 0; i < M.F.rank(); ++i) {
    auto lift = express_in(out.can_image[i], S, R);
    if (!lift) throw std::logic_error("bidual: canonical image not in bidual span");
    for (const auto& t : lift->t)
      out.can.at(t.pos, i) = out.can.at(t.pos, i) + Poly<K>::term(R, t.m, t.c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hom(M, N)

template <class K>
struct HomResult {
  Module<K> H;                          // presentation of Hom(M, N)
  std::vector<PolyMatrix<K>> hom_gens;  // generator k as a matrix F0(M) -> F0(N)
};

// Hom(M, N) = ker( Hom(F0, N) -> Hom(F1, N) ), phi |-> phi o A.
template <class K>
HomResult<K> hom_module(const Module<K>& M, const Module<K>& N) {
  const RingPtr& R = M.F.R;
  int r0 = M.F.rank(), rn = N.F.rank();
  int s = static_cast<int>(M.rel.size());

  auto hom_free = [&](const std::vector<long>& tw) {
    // Hom(F(tw), N) = sum of N(tw_i), gen degrees N.deg[k] - tw_i
    Module<K> H;
    std::vector<long> deg;
    for (long t : tw)
      for (long dk : N.F.deg) deg.push_back(dk - t);
    H.F = FreeModule(R, deg);
    for (size_t i = 0; i < tw.size(); ++i)
      for (const auto& rel : N.rel) {
        Vec<K> shifted = rel;
        for (auto& term : shifted.t) term.pos += static_cast<int>(i) * rn;
        H.rel.push_back(shifted);
      }
    return H;
  };

  Module<K> H0 = hom_free(M.F.deg);
  std::vector<long> sdeg;
  for (const auto& col : M.rel) sdeg.push_back(R->graded ? vec_degree(col, M.F) : 0L);
  Module<K> H1 = hom_free(sdeg);

  PolyMatrix<K> A = rel_matrix(M);
  PolyMatrix<K> Phi(R, s * rn, r0 * rn);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < r0; ++i)
      for (int k = 0; k < rn; ++k) Phi.at(j * rn + k, i * rn + k) = A.at(i, j);

  KernelResult<K> ker = s == 0
      ? KernelResult<K>{H0, [&] {
            std::vector<Vec<K>> units;
            for (int i = 0; i < r0 * rn; ++i) units.push_back(vec_unit<K>(R, i));
            return units;
          }()}
      : kernel_of_map(H0, H1, Phi);

  HomResult<K> out;
  out.H = ker.ker;
  for (const auto& g : ker.gens) {
    PolyMatrix<K> hm(R, rn, r0);
    for (const auto& term : g.t) {
      int i = term.pos / rn, k = term.pos % rn;
      hm.at(k, i) = hm.at(k, i) + Poly<K>::term(R, term.m, term.c);
    }
    out.hom_gens.push_back(std::move(hm));
  }
  return out;
}

// Torsion submodule = kernel of the canonical map M -> M**.
template <class K>
KernelResult<K> torsion_submodule(const Module<K>& M) {
  BidualResult<K> b = bidual_module(M);
  return kernel_of_map(M, b.dd, b.can);
}

// M / torsion presented via its image inside the bidual ambient.
template <class K>
struct TorsionSplit {
  Module<K> torsion;
  Module<K> free_part;             // M/torsion
  std::vector<Vec<K>> image_gens;  // generators of M/torsion inside bidual ambient
  BidualResult<K> bidual;
};

template <class K>
TorsionSplit<K> torsion_split(const Module<K>& M) {
  TorsionSplit<K> out;
  out.bidual = bidual_module(M);
  KernelResult<K> tor = kernel_of_map(M, out.bidual.dd, out.bidual.can);
  out.torsion = tor.ker;
  out.image_gens = out.bidual.can_image;
  out.free_part = present_subquotient(out.bidual.ambient, out.image_gens, {});
  return out;
}

// ---------------------------------------------------------------------------
// minimal presentation

template <class K>
struct MinimalPresentation {
  Module<K> M;
  std::vector<int> kept;  // surviving generator indices of the input
};

// Prune unit entries (exact nonzero constants) and redundant relations. Over
// a graded ring this reaches the graded-minimal presentation; the cokernel is
// free iff no relations remain.
template <class K>
MinimalPresentation<K> minimal_presentation(const Module<K>& Min) {
  Module<K> M = Min;
  const RingPtr& R = M.F.R;
  ModOrder ord = top_order<K>(R);
  std::vector<int> kept(M.F.rank());
  for (int i = 0; i < M.F.rank(); ++i) kept[i] = i;

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t j = 0; j < M.rel.size() && !changed; ++j) {
      for (const auto& t : M.rel[j].t) {
        if (!t.m.is_one()) continue;
        int i = t.pos;
        K c = t.c;
        // e_i = -(1/c) * (rel[j] - c e_i)
        Vec<K> rest;
        for (const auto& u : M.rel[j].t)
          if (!(u.pos == i && u.m.is_one())) rest.t.push_back(u);
        Vec<K> expr = vec_mul_term(vec_neg(rest), Monomial(R->nvars()), K(1) / c);
        std::vector<Vec<K>> nrel;
        for (size_t k = 0; k < M.rel.size(); ++k) {
          if (k == j) continue;
          Vec<K> col, at_i;
          for (const auto& u : M.rel[k].t)
            (u.pos == i ? at_i : col).t.push_back(u);
          for (const auto& u : at_i.t) col = vec_add(col, vec_mul_term(expr, u.m, u.c), ord);
          // reindex positions above i
          for (auto& u : col.t)
            if (u.pos > i) --u.pos;
          vec_sort(col, ord);
          if (!col.is_zero()) {
            vec_make_primitive(col);
            nrel.push_back(std::move(col));
          }
        }
        std::vector<long> ndeg = M.F.deg;
        ndeg.erase(ndeg.begin() + i);
        kept.erase(kept.begin() + i);
        M.F.deg = std::move(ndeg);
        M.rel = std::move(nrel);
        changed = true;
        break;
      }
    }
  }

  // drop relations lying in the span of the others (deterministic greedy)
  for (size_t j = 0; j < M.rel.size();) {
    std::vector<Vec<K>> others;
    for (size_t k = 0; k < M.rel.size(); ++k)
      if (k != j) others.push_back(M.rel[k]);
    GBasis<K> g = groebner_basis(R, others);
    if (in_span(M.rel[j], g))
      M.rel.erase(M.rel.begin() + j);
    else
      ++j;
  }

  MinimalPresentation<K> out;
  out.M = std::move(M);
  out.kept = std::move(kept);
  return out;
}

template <class K>
bool is_free_module(const Module<K>& M) {
  return minimal_presentation(M).M.rel.empty();
}

// ---------------------------------------------------------------------------
// free resolution

template <class K>
struct Resolution {
  std::vector<FreeModule> frees;          // F0, F1, ...
  std::vector<std::vector<Vec<K>>> maps;  // maps[k]: columns of F_{k+1} -> F_k
};

template <class K>
std::vector<Vec<K>> minimize_generators(const RingPtr& R, std::vector<Vec<K>> gens) {
  for (size_t j = 0; j < gens.size();) {
    std::vector<Vec<K>> others;
    for (size_t k = 0; k < gens.size(); ++k)
      if (k != j) others.push_back(gens[k]);
    GBasis<K> g = groebner_basis(R, others);
    if (in_span(gens[j], g))
      gens.erase(gens.begin() + j);
    else
      ++j;
  }
  return gens;
}

template <class K>
Resolution<K> free_resolution(const Module<K>& Min, int max_length) {
  MinimalPresentation<K> mp = minimal_presentation(Min);
  Module<K> M = mp.M;
  Resolution<K> res;
  res.frees.push_back(M.F);
  std::vector<Vec<K>> cur = minimize_generators(M.F.R, M.rel);
  FreeModule amb = M.F;
  int level = 0;
  while (!cur.empty()) {
    if (level >= max_length)
      throw std::runtime_error("free_resolution: exceeded max length");
    res.maps.push_back(cur);
    FreeModule next(M.F.R, vec_degrees(cur, amb));
    res.frees.push_back(next);
    cur = minimize_generators(M.F.R, syzygies(M.F.R, cur, amb.rank()));
    amb = next;
    ++level;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Hilbert function / polynomial (standard graded rings only)

inline long monomial_count(int nvars, long d) {
  if (d < 0) return 0;
  // C(d + nvars - 1, nvars - 1)
  long num = 1, den = 1;
  for (int i = 1; i <= nvars - 1; ++i) {
    num *= d + i;
    den *= i;
  }
  return num / den;
}

inline void enumerate_monomials(int nvars, long d, const std::function<void(const Monomial&)>& fn) {
  Monomial m(nvars);
  std::function<void(int, long)> rec = [&](int j, long left) {
    if (j + 1 == nvars) {
      m.e[j] = static_cast<int>(left);
      fn(m);
      m.e[j] = 0;
      return;
    }
    for (long e = 0; e <= left; ++e) {
      m.e[j] = static_cast<int>(e);
      rec(j + 1, left - e);
    }
    m.e[j] = 0;
  };
  if (d >= 0) rec(0, d);
}

template <class K>
long hilbert_function(const Module<K>& M, long d, const GBasis<K>* gb_hint = nullptr) {
  const RingPtr& R = M.F.R;
  if (!R->standard_graded())
    throw std::logic_error("hilbert_function: ring not standard graded");
  GBasis<K> own;
  const GBasis<K>* gb = gb_hint;
  if (!gb) {
    own = module_gb(M);
    gb = &own;
  }
  LeadCone<K> cone = lead_cone(*gb, M.F.rank());
  long total = 0;
  int nv = static_cast<int>(R->nvars());
  for (int pos = 0; pos < M.F.rank(); ++pos) {
    long e = d - M.F.deg[pos];
    if (e < 0) continue;
    if (cone.leads[pos].empty()) {
      total += monomial_count(nv, e);
      continue;
    }
    long cnt = 0;
    enumerate_monomials(nv, e, [&](const Monomial& m) {
      if (!divisible_by_any(m, cone.leads[pos])) ++cnt;
    });
    total += cnt;
  }
  return total;
}

// Castelnuovo-Mumford-style regularity bound from a minimal free resolution.
template <class K>
long regularity_bound(const Module<K>& M) {
  Resolution<K> res = free_resolution(M, static_cast<int>(M.F.R->nvars()) + 1);
  long reg = 0;
  bool any = false;
  for (size_t i = 0; i < res.frees.size(); ++i)
    for (long d : res.frees[i].deg) {
      long v = d - static_cast<long>(i);
      if (!any || v > reg) reg = v;
      any = true;
    }
  return any ? reg : 0;
}

template <class K>
struct HilbertPolynomial {
  std::vector<Rational> coeff;  // c0 + c1 d + c2 d^2 (rationals; exact)
  long valid_from;              // agrees with the Hilbert function for d >= valid_from

  Rational eval(long d) const {
    Rational r(0);
    for (size_t i = coeff.size(); i-- > 0;) r = r * Rational(d) + coeff[i];
    return r;
  }
};

// Exact polynomial through points (d, HF(d)) for d = start..start+deg via
// Newton forward differences.
template <class K>
HilbertPolynomial<K> hilbert_polynomial(const Module<K>& M) {
  const RingPtr& R = M.F.R;
  int nv = static_cast<int>(R->nvars());
  int deg = nv - 1;  // dimension of projective ambient
  long b = regularity_bound(M);
  GBasis<K> gb = module_gb(M);
  std::vector<Rational> vals;
  for (int i = 0; i <= deg; ++i) vals.emplace_back(hilbert_function(M, b + i, &gb));
  // Newton forward differences at integer nodes b, b+1, ...
  std::vector<std::vector<Rational>> diff{vals};
  for (int k = 1; k <= deg; ++k) {
    std::vector<Rational> row;
    for (size_t i = 0; i + 1 < diff.back().size(); ++i)
      row.push_back(diff.back()[i + 1] - diff.back()[i]);
    diff.push_back(row);
  }
  // p(d) = sum_k diff[k][0] * C(d - b, k)
  // expand into monomial coefficients
  std::vector<Rational> poly(deg + 1, Rational(0));
  std::vector<Rational> basis{Rational(1)};  // coefficients of C(d-b, k) as polynomial in d
  for (int k = 0; k <= deg; ++k) {
    if (k > 0) {
      // multiply basis by (d - b - (k-1)) / k
      std::vector<Rational> nb(basis.size() + 1, Rational(0));
      Rational shift = Rational(-(b + k - 1));
      for (size_t i = 0; i < basis.size(); ++i) {
        nb[i + 1] = nb[i + 1] + basis[i];
        nb[i] = nb[i] + basis[i] * shift;
      }
      for (auto& c : nb) c = c / Rational(k);
      basis = std::move(nb);
    }
    for (size_t i = 0; i < basis.size(); ++i) poly[i] = poly[i] + diff[k][0] * basis[i];
  }
  HilbertPolynomial<K> out;
  out.coeff = poly;
  out.valid_from = b;
  // sanity: agreement at two further points
  for (int extra = 1; extra <= 2; ++extra) {
    long d = b + deg + extra;
    if (out.eval(d) != Rational(hilbert_function(M, d, &gb)))
      throw std::logic_error("hilbert_polynomial: fit does not extend");
  }
  return out;
}

// ---------------------------------------------------------------------------
// determinants and Fitting ideals

template <class K>
Poly<K> determinant(const PolyMatrix<K>& A, std::vector<int> rows, std::vector<int> cols) {
  if (rows.empty()) return Poly<K>::constant(A.R, K(1));
  Poly<K> det = Poly<K>::zero(A.R);
  int r0 = rows[0];
  std::vector<int> rrest(rows.begin() + 1, rows.end());
  for (size_t k = 0; k < cols.size(); ++k) {
    const Poly<K>& e = A.at(r0, cols[k]);
    if (e.is_zero()) continue;
    std::vector<int> crest;
    for (size_t j = 0; j < cols.size(); ++j)
      if (j != k) crest.push_back(cols[j]);
    Poly<K> sub = determinant(A, rrest, crest);
    Poly<K> term = e * sub;
    det = (k % 2 == 0) ? det + term : det - term;
  }
  return det;
}

// Fitting ideal Fitt_k(M): generated by the (g-k)-minors of a presentation
// matrix with g generators. Fitt_k = (1) when g - k <= 0.
template <class K>
std::vector<Poly<K>> fitting_ideal(const Module<K>& M, int k) {
  const RingPtr& R = M.F.R;
  int g = M.F.rank();
  int size = g - k;
  if (size <= 0) return {Poly<K>::constant(R, K(1))};
  PolyMatrix<K> A = rel_matrix(M);
  if (size > A.rows || size > A.cols) return {Poly<K>::zero(R)};
  std::vector<Poly<K>> gens;
  std::vector<int> rows, cols;
  std::function<void(int, int)> pick_cols = [&](int start, int need) {
    if (need == 0) {
      Poly<K> d = determinant(A, rows, cols);
      if (!d.is_zero()) gens.push_back(d);
      return;
    }
    for (int j = start; j <= A.cols - need; ++j) {
      cols.push_back(j);
      pick_cols(j + 1, need - 1);
      cols.pop_back();
    }
  };
  std::function<void(int, int)> pick_rows = [&](int start, int need) {
    if (need == 0) {
      pick_cols(0, size);
      return;
    }
    for (int i = start; i <= A.rows - need; ++i) {
      rows.push_back(i);
      pick_rows(i + 1, need - 1);
      rows.pop_back();
    }
  };
  pick_rows(0, size);
  if (gens.empty()) gens.push_back(Poly<K>::zero(R));
  return gens;
}

}  // namespace bubbletree
