#pragma once

// Coherent-sheaf calculus on P2 and on lines P1 inside it, over the graded
// module engine: saturation, twisted global sections, Chern data, slope
// semistability, maximal destabilizers, splitting types on lines, singular
// points with local charges, and O-section extraction.

#include <optional>
#include <sstream>

#include "modops.hpp"
#include "parse.hpp"
#include "points.hpp"

namespace bubbletree {

struct ChernData {
  long rank = 0, c1 = 0, c2 = 0;
  long delta() const { return 4 * c2 - c1 * c1; }
  friend bool operator==(const ChernData& a, const ChernData& b) {
    return a.rank == b.rank && a.c1 == b.c1 && a.c2 == b.c2;
  }
};

struct SplittingType {
  std::vector<long> a;  // twists, descending
  long torsion = 0;
  friend bool operator==(const SplittingType& x, const SplittingType& y) {
    return x.a == y.a && x.torsion == y.torsion;
  }
  bool trivial() const {
    for (long v : a)
      if (v != 0) return false;
    return torsion == 0;
  }
};

template <class K>
Module<K> twist_module(Module<K> M, long k) {
  for (auto& d : M.F.deg) d += k;
  return M;
}

template <class K>
std::vector<Poly<K>> irrelevant_ideal(const RingPtr& R) {
  std::vector<Poly<K>> J;
  for (size_t i = 0; i < R->nvars(); ++i) J.push_back(Poly<K>::variable(R, static_cast<int>(i)));
  return J;
}

// Basis of the degree-d piece of the span of homogeneous generators inside a
// graded free module, in reduced row echelon form (deterministic).
template <class K>
std::vector<Vec<K>> degree_piece_basis(const FreeModule& F, const std::vector<Vec<K>>& gens,
                                       long d) {
  const RingPtr& R = F.R;
  ModOrder ord = top_order<K>(R);
  // coordinate basis of the degree-d piece of F, canonical order
  std::vector<ModTerm<K>> coords;
  for (int pos = 0; pos < F.rank(); ++pos)
    enumerate_monomials(static_cast<int>(R->nvars()), d - F.deg[pos],
                        [&](const Monomial& m) { coords.push_back({m, pos, K(1)}); });
  std::sort(coords.begin(), coords.end(),
            [&](const ModTerm<K>& a, const ModTerm<K>& b) { return ord.compare(a, b) > 0; });
  std::map<std::pair<std::vector<int>, int>, size_t> index;
  for (size_t i = 0; i < coords.size(); ++i) index[{coords[i].m.e, coords[i].pos}] = i;

  std::vector<std::vector<K>> rows;
  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    long gd = vec_degree(g, F);
    enumerate_monomials(static_cast<int>(R->nvars()), d - gd, [&](const Monomial& m) {
      Vec<K> w = vec_mul_term(g, m, K(1));
      std::vector<K> row(coords.size(), K(0));
      for (const auto& t : w.t) row[index.at({t.m.e, t.pos})] = t.c;
      rows.push_back(std::move(row));
    });
  }
  // reduced row echelon
  size_t rank = 0;
  for (size_t c = 0; c < coords.size() && rank < rows.size(); ++c) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][c].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    K inv = rows[rank][c].inv();
    for (auto& x : rows[rank]) x = x * inv;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c].is_zero()) continue;
      K f = rows[r][c];
      for (size_t cc = 0; cc < coords.size(); ++cc)
        rows[r][cc] = rows[r][cc] - f * rows[rank][cc];
    }
    ++rank;
  }
  std::vector<Vec<K>> out;
  for (size_t r = 0; r < rank; ++r) {
    Vec<K> v;
    for (size_t c = 0; c < coords.size(); ++c)
      if (!rows[r][c].is_zero()) v.t.push_back({coords[c].m, coords[c].pos, rows[r][c]});
    vec_sort(v, ord);
    out.push_back(std::move(v));
  }
  return out;
}

template <class K>
long submodule_dim_in_degree(const FreeModule& F, const GBasis<K>& gb, long d) {
  LeadCone<K> cone = lead_cone(gb, F.rank());
  long total = 0;
  int nv = static_cast<int>(F.R->nvars());
  for (int pos = 0; pos < F.rank(); ++pos) {
    long e = d - F.deg[pos];
    if (e < 0) continue;
    enumerate_monomials(nv, e, [&](const Monomial& m) {
      if (divisible_by_any(m, cone.leads[pos])) ++total;
    });
  }
  return total;
}

// Analysis bundle for a sheaf presented by a graded module: torsion split,
// the saturated model of the torsion-free part inside the bidual ambient,
// and the sheaf length of the torsion part.
template <class K>
struct SheafAnalysis {
  Module<K> M;
  TorsionSplit<K> split;
  std::vector<Vec<K>> sat;  // Gamma-saturation of the image of M in the bidual ambient
  GBasis<K> sat_gb;
  bool torsion_zero = true;
  bool torsion_len_defined = true;
  long torsion_len = 0;  // sheaf length of the torsion part, when 0-dimensional
};

template <class K>
SheafAnalysis<K> analyze_sheaf(const Module<K>& M) {
  SheafAnalysis<K> out;
  out.M = M;
  out.split = torsion_split(M);
  const RingPtr& R = M.F.R;
  out.sat = saturate_submodule(out.split.bidual.ambient, out.split.bidual.can_image,
                               irrelevant_ideal<K>(R));
  out.sat_gb = groebner_basis(R, out.sat);
  out.torsion_zero = is_zero_module(out.split.torsion);
  if (out.torsion_zero) {
    out.torsion_len = 0;
  } else {
    auto hp = hilbert_polynomial(out.split.torsion);
    bool constant = true;
    for (size_t i = 1; i < hp.coeff.size(); ++i)
      if (!hp.coeff[i].is_zero()) constant = false;
    if (constant) {
      Rational v = hp.coeff.empty() ? Rational(0) : hp.coeff[0];
      if (!v.is_integer()) throw std::logic_error("sheaf: non-integer torsion length");
      out.torsion_len = v.num().fits_ll() ? v.num().to_ll() : throw std::logic_error("overflow");
    } else {
      out.torsion_len_defined = false;
    }
  }
  return out;
}

// dim H^0 of the twisted sheaf: sections of the saturated torsion-free part
// plus the (constant) contribution of point-supported torsion.
template <class K>
long h0(const SheafAnalysis<K>& A, long d) {
  if (!A.torsion_len_defined)
    throw std::logic_error("h0: torsion part is not zero-dimensional");
  return A.torsion_len + submodule_dim_in_degree(A.split.bidual.ambient, A.sat_gb, d);
}

// Chern data via the Hilbert polynomial, cross-checked against the
// alternating twist sums of a free resolution:
//   chi(F(d)) = r (d+1)(d+2)/2 + c1 (d + 3/2) + (c1^2 - 2 c2)/2.
template <class K>
ChernData chern(const Module<K>& M) {
  auto as_long = [](const Rational& q, const char* what) {
    if (!q.is_integer() || !q.num().fits_ll())
      throw std::logic_error(std::string("chern: non-integer ") + what);
    return static_cast<long>(q.num().to_ll());
  };
  auto hp = hilbert_polynomial(M);
  while (hp.coeff.size() < 3) hp.coeff.push_back(Rational(0));
  Rational r = hp.coeff[2] * Rational(2);
  Rational c1 = hp.coeff[1] - Rational(3) * r / Rational(2);
  Rational c2 = r + Rational(3) * c1 / Rational(2) + c1 * c1 / Rational(2) - hp.coeff[0];
  ChernData out;
  out.rank = as_long(r, "rank");
  out.c1 = as_long(c1, "c1");
  out.c2 = as_long(c2, "c2");

  Resolution<K> res = free_resolution(M, static_cast<int>(M.F.R->nvars()) + 1);
  long r2 = 0, c12 = 0;
  Rational ch2(0);
  int sign = 1;
  for (const auto& F : res.frees) {
    r2 += sign * F.rank();
    for (long dg : F.deg) {
      c12 += sign * (-dg);
      ch2 = ch2 + Rational(sign) * Rational(dg) * Rational(dg) / Rational(2);
    }
    sign = -sign;
  }
  long c22 = as_long(Rational(c12) * Rational(c12) / Rational(2) - ch2, "c2 (resolution)");
  if (r2 != out.rank || c12 != out.c1 || c22 != out.c2)
    throw std::logic_error("chern: Hilbert-polynomial and resolution routes disagree");
  return out;
}

enum class Stability { stable, strictly_semistable, unstable };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::strictly_semistable: return "strictly_semistable";
    case Stability::unstable: return "unstable";
  }
  return "?";
}

// Sections of twists of the reflexive hull F**.
template <class K>
long h0_bidual(const SheafAnalysis<K>& A, long d) {
  GBasis<K> gb = groebner_basis(A.M.F.R, A.split.bidual.dd_gens);
  return submodule_dim_in_degree(A.split.bidual.ambient, gb, d);
}

// Slope (semi)stability for rank-2 sheaves with normalized c1, detected on
// the reflexive hull: a destabilizing line bundle O(d), d above the slope
// threshold, shows up as a section of F**(-d).
template <class K>
Stability is_semistable(const SheafAnalysis<K>& A, const ChernData& ch) {
  if (ch.rank != 2) throw std::invalid_argument("is_semistable: rank must be 2");
  if (ch.c1 != 0 && ch.c1 != -1) throw std::invalid_argument("is_semistable: c1 not normalized");
  if (ch.c1 == 0) {
    if (h0_bidual(A, -1) > 0) return Stability::unstable;
    return h0_bidual(A, 0) == 0 ? Stability::stable : Stability::strictly_semistable;
  }
  return h0_bidual(A, 0) > 0 ? Stability::unstable : Stability::stable;
}

template <class K>
struct Destabilizer {
  long deg_L = 0;                  // degree of the maximal destabilizing subsheaf
  long deg_Q = 0;                  // c1 of the torsion-free quotient
  std::vector<Vec<K>> L_gens;      // generators of L inside the ambient of F
  Module<K> L;                     // presentation of L
  Module<K> Q;                     // presentation of the quotient F/L (same ambient as F)
  PolyMatrix<K> surjection;        // identity-shaped map F0(F) -> F0(Q)
};

template <class K>
Destabilizer<K> max_destabilizer(const SheafAnalysis<K>& A, const ChernData& ch) {
  if (is_semistable(A, ch) != Stability::unstable)
    throw std::invalid_argument("max_destabilizer: input is semistable");
  const RingPtr& R = A.M.F.R;
  long threshold = ch.c1 == 0 ? 1 : 0;
  long dmax = threshold;
  // h0(F**(-d)) is non-increasing in d (multiply sections by a linear form)
  // and vanishes once -d drops below the least generator degree of the
  // saturated hull, so the scan terminates; the cap only guards a bug.
  long cap = threshold + 200;
  for (long d = threshold;; ++d) {
    if (d > cap) throw std::logic_error("max_destabilizer: section degrees did not vanish");
    if (h0_bidual(A, -d) > 0)
      dmax = d;
    else
      break;
  }

  GBasis<K> ddgb = groebner_basis(R, A.split.bidual.dd_gens);
  auto basis = degree_piece_basis(A.split.bidual.ambient, A.split.bidual.dd_gens, -dmax);
  if (basis.empty()) throw std::logic_error("max_destabilizer: no section found");
  Vec<K> s = basis.front();

  std::vector<Vec<K>> Lt =
      saturate_submodule(A.split.bidual.ambient, {s}, irrelevant_ideal<K>(R));

  // quotient of F** by the saturated line subsheaf, then pull back into F
  SyzResult<K> S = groebner_with_syzygies(R, A.split.bidual.dd_gens,
                                          A.split.bidual.ambient.rank());
  Module<K> N = A.split.bidual.dd;
  ModOrder ord = top_order<K>(R);
  for (const auto& g : Lt) {
    auto lift = express_in(g, S, R);
    if (!lift) throw std::logic_error("max_destabilizer: saturation left the bidual");
    Vec<K> v = *lift;
    vec_sort(v, ord);
    N.rel.push_back(v);
  }
  KernelResult<K> ker = kernel_of_map(A.M, N, A.split.bidual.can);

  Destabilizer<K> out;
  out.deg_L = dmax;
  out.deg_Q = ch.c1 - dmax;
  out.L_gens = ker.gens;
  out.L = ker.ker;
  out.Q = A.M;
  for (const auto& g : ker.gens) out.Q.rel.push_back(g);
  out.surjection = PolyMatrix<K>(R, A.M.F.rank(), A.M.F.rank());
  for (int i = 0; i < A.M.F.rank(); ++i) out.surjection.at(i, i) = Poly<K>::constant(R, K(1));
  return out;
}

// ---------------------------------------------------------------------------
// restriction to a line

// Substitute the pivot variable of the linear form away, landing in a
// 2-variable ring on the remaining coordinates.
template <class K>
Module<K> restrict_module_to_line(const Module<K>& M, const Poly<K>& line, RingPtr* line_ring_out) {
  const RingPtr& R = M.F.R;
  if (line.is_zero()) throw std::invalid_argument("restrict_to_line: zero form");
  std::vector<K> coeff(R->nvars(), K(0));
  for (const auto& [m, c] : line.terms()) {
    if (m.total_degree() != 1) throw std::invalid_argument("restrict_to_line: not linear");
    for (size_t i = 0; i < R->nvars(); ++i)
      if (m.e[i] == 1) coeff[i] = c;
  }
  int pivot = -1;
  for (int i = static_cast<int>(R->nvars()) - 1; i >= 0; --i)
    if (!coeff[i].is_zero()) {
      pivot = i;
      break;
    }
  std::vector<std::string> keep_names;
  std::vector<int> keep_idx;
  for (int i = 0; i < static_cast<int>(R->nvars()); ++i)
    if (i != pivot) {
      keep_names.push_back(R->vars[i]);
      keep_idx.push_back(i);
    }
  RingPtr L = make_ring(keep_names, std::vector<int>(keep_names.size(), 1));
  if (line_ring_out) *line_ring_out = L;

  std::vector<Poly<K>> images(R->nvars(), Poly<K>::zero(L));
  for (size_t k = 0; k < keep_idx.size(); ++k)
    images[keep_idx[k]] = Poly<K>::variable(L, static_cast<int>(k));
  Poly<K> pv = Poly<K>::zero(L);
  for (size_t k = 0; k < keep_idx.size(); ++k)
    pv = pv + images[keep_idx[k]].scale(-coeff[keep_idx[k]] / coeff[pivot]);
  images[pivot] = pv;

  Module<K> out;
  out.F = FreeModule(L, M.F.deg);
  ModOrder ord = top_order<K>(L);
  PolyMatrix<K> A = rel_matrix(M);
  for (int j = 0; j < A.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < A.rows; ++i) {
      Poly<K> p = A.at(i, j).substitute(L, images);
      for (const auto& [m, c] : p.terms()) col.t.push_back({m, i, c});
    }
    vec_sort(col, ord);
    if (!col.is_zero()) out.rel.push_back(col);
  }
  return out;
}

// Splitting type of a module over the homogeneous coordinate ring of P1:
// twists from the free bidual of the torsion-free part, torsion length from
// the constant Hilbert polynomial of the torsion part; the h0-profile of the
// saturated model reproduces the same data and is cross-checked.
template <class K>
SplittingType p1_splitting_type(const Module<K>& M) {
  const RingPtr& R = M.F.R;
  if (R->nvars() != 2) throw std::invalid_argument("p1_splitting_type: need 2 variables");
  SheafAnalysis<K> A = analyze_sheaf(M);
  if (!A.torsion_len_defined)
    throw std::logic_error("p1_splitting_type: torsion not point-supported");

  auto mp = minimal_presentation(A.split.bidual.dd);
  if (!mp.M.rel.empty())
    throw std::logic_error("p1_splitting_type: bidual on P1 is not free");
  SplittingType out;
  for (long d : mp.M.F.deg) out.a.push_back(-d);
  std::sort(out.a.rbegin(), out.a.rend());
  out.torsion = A.torsion_len;

  // h0-profile cross-check: the profile of the saturated model must equal
  // torsion + sum max(0, a_i + d + 1); its successive differences recover the
  // twist multiset, so this pins the splitting type by an independent route.
  if (!out.a.empty() || out.torsion > 0) {
    long lo = 0, hi = 1;
    for (long v : out.a) {
      lo = std::min(lo, -v - 1);
      hi = std::max(hi, -v + 1);
    }
    for (long d = lo; d <= hi + static_cast<long>(out.a.size()); ++d) {
      long expect = out.torsion;
      for (long ai : out.a) expect += std::max<long>(0, ai + d + 1);
      if (h0(A, d) != expect)
        throw std::logic_error("p1_splitting_type: h0-profile disagrees with bidual twists");
    }
  }
  return out;
}

template <class K>
SplittingType restrict_to_line(const Module<K>& M, const Poly<K>& line) {
  return p1_splitting_type(restrict_module_to_line(M, line, nullptr));
}

// ---------------------------------------------------------------------------
// singular points

struct SingularPoint {
  std::vector<std::string> point;       // projective coordinates when rational, e.g. [0,0,1]
  std::vector<std::string> prime_gens;  // homogeneous prime ideal generators
  int residue_degree = 1;
  long local_charge = 0;
  std::string chart;                    // affine chart used for the local computation
  std::vector<std::string> local_presentation;  // dehomogenized presentation entries
};

// The saturated minimal presentation of the sheaf (canonical model).
template <class K>
Module<K> saturated_presentation(const SheafAnalysis<K>& A) {
  Module<K> sat = present_subquotient(A.split.bidual.ambient, A.sat, {});
  return minimal_presentation(sat).M;
}

template <class K>
Module<K> dehomogenize(const Module<K>& M, int chart_var, const RingPtr& affine) {
  const RingPtr& R = M.F.R;
  std::vector<Poly<K>> images;
  int k = 0;
  for (int i = 0; i < static_cast<int>(R->nvars()); ++i) {
    if (i == chart_var)
      images.push_back(Poly<K>::constant(affine, K(1)));
    else
      images.push_back(Poly<K>::variable(affine, k++));
  }
  Module<K> out;
  out.F = FreeModule(affine, std::vector<long>(M.F.rank(), 0));
  ModOrder ord = top_order<K>(affine);
  PolyMatrix<K> A = rel_matrix(M);
  for (int j = 0; j < A.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < A.rows; ++i) {
      Poly<K> p = A.at(i, j).substitute(affine, images);
      for (const auto& [m, c] : p.terms()) col.t.push_back({m, i, c});
    }
    vec_sort(col, ord);
    if (!col.is_zero()) out.rel.push_back(col);
  }
  return out;
}

template <class K>
Module<K> translate_module(const Module<K>& M, const std::vector<K>& shift) {
  const RingPtr& R = M.F.R;
  std::vector<Poly<K>> images;
  for (size_t i = 0; i < R->nvars(); ++i)
    images.push_back(Poly<K>::variable(R, static_cast<int>(i)) +
                     Poly<K>::constant(R, shift[i]));
  Module<K> out;
  out.F = M.F;
  ModOrder ord = top_order<K>(R);
  PolyMatrix<K> A = rel_matrix(M);
  for (int j = 0; j < A.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < A.rows; ++i) {
      Poly<K> p = A.at(i, j).substitute(R, images);
      for (const auto& [m, c] : p.terms()) col.t.push_back({m, i, c});
    }
    vec_sort(col, ord);
    if (!col.is_zero()) out.rel.push_back(col);
  }
  return out;
}

// F**/F as a module over the P2 ring: the bidual presentation with the
// canonical-map columns adjoined as relations.
template <class K>
Module<K> bidual_quotient(const SheafAnalysis<K>& A) {
  Module<K> cokernel = A.split.bidual.dd;
  const PolyMatrix<K>& can = A.split.bidual.can;
  ModOrder ord = top_order<K>(A.M.F.R);
  for (int j = 0; j < can.cols; ++j) {
    Vec<K> v;
    for (int i = 0; i < can.rows; ++i)
      for (const auto& [m, c] : can.at(i, j).terms()) v.t.push_back({m, i, c});
    vec_sort(v, ord);
    if (!v.is_zero()) cokernel.rel.push_back(v);
  }
  return cokernel;
}

// Singular points of a torsion-free rank-2 sheaf on P2: support of F**/F,
// located as the vanishing of Fitt_2 of the saturated minimal presentation,
// with local charges = local lengths of F**/F.
template <class K>
std::vector<SingularPoint> singular_points(const SheafAnalysis<K>& A, const ChernData& ch) {
  if constexpr (!std::is_same_v<K, Rational>) {
    throw std::logic_error("singular_points: point decomposition requires the rational field");
  } else {
  const RingPtr& R = A.M.F.R;
  if (ch.rank != 2) throw std::invalid_argument("singular_points: rank must be 2");
  if (!A.torsion_zero) throw std::invalid_argument("singular_points: input has torsion");

  Module<K> satmin = saturated_presentation(A);
  std::vector<Poly<K>> fitt = fitting_ideal(satmin, 2);
  FreeModule amb1 = FreeModule::trivial(R, 1);
  ModOrder ord = top_order<K>(R);
  std::vector<Vec<K>> fitt_vecs;
  for (const auto& f : fitt) {
    if (f.is_zero()) continue;
    Vec<K> v;
    for (const auto& [m, c] : f.terms()) v.t.push_back({m, 0, c});
    vec_sort(v, ord);
    fitt_vecs.push_back(std::move(v));
  }
  std::vector<Vec<K>> sat_fitt = saturate_submodule(amb1, fitt_vecs, irrelevant_ideal<K>(R));
  GBasis<K> fgb = groebner_basis(R, sat_fitt);
  if (in_span(vec_unit<K>(R, 0), fgb)) return {};  // locally free

  // 0-dimensionality: the saturated Fitting ideal must define finitely many points
  Module<K> quot;
  quot.F = amb1;
  quot.rel = sat_fitt;
  auto hp = hilbert_polynomial(quot);
  for (size_t i = 1; i < hp.coeff.size(); ++i)
    if (!hp.coeff[i].is_zero())
      throw std::logic_error("singular_points: positive-dimensional non-free locus");

  Module<K> T = bidual_quotient(A);

  std::vector<SingularPoint> out;
  // chart z=1 covers every point not on {last var = 0}; then recurse formally
  // by intersecting with the hyperplane at infinity.
  int nv = static_cast<int>(R->nvars());
  RingPtr affine = make_ring(
      [&] {
        std::vector<std::string> names;
        for (int i = 0; i + 1 < nv; ++i) names.push_back("loc_" + R->vars[i]);
        return names;
      }(),
      std::vector<int>(nv - 1, 1), false);

  PolyMatrix<K> fitt_cols = columns_to_matrix(R, 1, sat_fitt);
  std::vector<Poly<K>> chart_gens;
  {
    std::vector<Poly<K>> images;
    int k = 0;
    for (int i = 0; i < nv; ++i) {
      if (i == nv - 1)
        images.push_back(Poly<K>::constant(affine, K(1)));
      else
        images.push_back(Poly<K>::variable(affine, k++));
    }
    for (int j = 0; j < fitt_cols.cols; ++j)
      chart_gens.push_back(fitt_cols.at(0, j).substitute(affine, images));
  }
  auto components = decompose_zero_dim(affine, chart_gens);
  for (const auto& pc : components) {
    SingularPoint sp;
    sp.residue_degree = pc.residue_degree;
    sp.chart = R->vars[nv - 1] + "=1";
    Module<K> Tloc = dehomogenize(T, nv - 1, affine);
    if (pc.rational_point) {
      auto [u, v] = *pc.rational_point;
      sp.point = {u.to_string(), v.to_string(), "1"};
      sp.prime_gens = {R->vars[0] + " - (" + u.to_string() + ")*" + R->vars[2],
                       R->vars[1] + " - (" + v.to_string() + ")*" + R->vars[2]};
      Module<K> shifted = translate_module(Tloc, {u, v});
      sp.local_charge = local_length_at_origin(shifted);
      // local model: dehomogenized presentation of the sheaf near the point
      Module<K> local_model = translate_module(dehomogenize(satmin, nv - 1, affine), {u, v});
      PolyMatrix<K> lm = rel_matrix(minimal_presentation(local_model).M);
      for (int j = 0; j < lm.cols; ++j) {
        std::string col;
        for (int i = 0; i < lm.rows; ++i) col += (i ? ", " : "") + lm.at(i, j).to_string();
        sp.local_presentation.push_back("(" + col + ")");
      }
    } else {
      // homogenize the chart-local prime generators back to k[X,Y,Z]
      for (const auto& gstr : pc.prime_gens) {
        Poly<K> g = parse_poly<K>(affine, gstr);
        int d = g.total_degree();
        Poly<K> hom = Poly<K>::zero(R);
        for (const auto& [m, c] : g.terms()) {
          Monomial mm(3);
          mm.e[0] = m.e[0];
          mm.e[1] = m.e[1];
          mm.e[2] = d - m.e[0] - m.e[1];
          hom = hom + Poly<K>::term(R, mm, c);
        }
        sp.prime_gens.push_back(hom.to_string());
      }
      // total length of the P-primary component divided by the residue degree
      ModOrder aord = top_order<K>(affine);
      long prev = -1, stable = -1;
      for (int N = 1; N <= 12; ++N) {
        Module<K> q = Tloc;
        std::vector<Poly<K>> pgens;
        for (const auto& g : pc.prime_gens) pgens.push_back(parse_poly<K>(affine, g));
        // add P^N * generators
        std::vector<Poly<K>> powerN{Poly<K>::constant(affine, K(1))};
        for (int t = 0; t < N; ++t) {
          std::vector<Poly<K>> nxt;
          for (const auto& a : powerN)
            for (const auto& b : pgens) nxt.push_back(a * b);
          powerN = nxt;
        }
        for (int pos = 0; pos < q.F.rank(); ++pos)
          for (const auto& p : powerN) {
            Vec<K> v;
            for (const auto& [m, c] : p.terms()) v.t.push_back({m, pos, c});
            vec_sort(v, aord);
            q.rel.push_back(v);
          }
        long len = module_length(q);
        if (len == prev) {
          stable = len;
          break;
        }
        prev = len;
      }
      if (stable < 0) throw std::logic_error("singular_points: component length unstable");
      if (stable % pc.residue_degree != 0)
        throw std::logic_error("singular_points: length not divisible by residue degree");
      sp.local_charge = stable / pc.residue_degree;
    }
    out.push_back(std::move(sp));
  }

  // points on the hyperplane at infinity would require the other charts; the
  // Fitting locus there is the common zero of the forms with last var = 0
  {
    std::vector<Poly<K>> at_inf;
    RingPtr lring = make_ring({R->vars[0], R->vars[1]}, {1, 1});
    std::vector<Poly<K>> images = {Poly<K>::variable(lring, 0), Poly<K>::variable(lring, 1),
                                   Poly<K>::zero(lring)};
    bool all_zero = true;
    GBasis<K> lgb = [&] {
      std::vector<Vec<K>> vv;
      ModOrder lord = top_order<K>(lring);
      for (int j = 0; j < fitt_cols.cols; ++j) {
        Poly<K> p = fitt_cols.at(0, j).substitute(lring, images);
        if (!p.is_zero()) all_zero = false;
        Vec<K> v;
        for (const auto& [m, c] : p.terms()) v.t.push_back({m, 0, c});
        vec_sort(v, lord);
        if (!v.is_zero()) vv.push_back(v);
      }
      return groebner_basis(lring, vv);
    }();
    if (all_zero)
      throw std::logic_error("singular_points: positive-dimensional locus at infinity");
    std::vector<Vec<K>> sat_inf =
        saturate_submodule(FreeModule::trivial(lring, 1), lgb.g, irrelevant_ideal<K>(lring));
    GBasis<K> sgb = groebner_basis(lring, sat_inf);
    if (!in_span(vec_unit<K>(lring, 0), sgb))
      throw std::logic_error(
          "singular_points: singular locus meets the line at infinity (unsupported chart)");
  }

  long total = 0;
  for (const auto& sp : out) total += sp.local_charge * sp.residue_degree;
  ChernData chdd = chern(A.split.bidual.dd);
  if (total != ch.c2 - chdd.c2)
    throw std::logic_error("singular_points: charges do not sum to c2(F) - c2(F**)");
  return out;
  }
}

// ---------------------------------------------------------------------------
// O-section and ideal quotient

template <class K>
struct SectionReport {
  Vec<K> section;                    // in the bidual ambient of F
  Module<K> quotient;                // F / O s (saturated model)
  std::vector<Poly<K>> ideal_gens;   // saturated homogeneous ideal of the quotient
  long ideal_colength = 0;           // degree of the quotient subscheme
  long twist = 0;                    // quotient is I(twist)
};

// A nonzero section with torsion-free quotient, when h0(F) > 0: the quotient
// is an ideal sheaf twist, returned with its saturated homogeneous ideal.
template <class K>
std::optional<SectionReport<K>> free_summand_section(const SheafAnalysis<K>& A,
                                                     const ChernData& ch) {
  const RingPtr& R = A.M.F.R;
  if (ch.rank != 2 || ch.c1 != 0)
    throw std::invalid_argument("free_summand_section: need rank 2, c1 = 0");
  if (h0(A, 0) == 0) return std::nullopt;
  auto basis = degree_piece_basis(A.split.bidual.ambient, A.sat, 0);
  if (basis.empty()) return std::nullopt;

  SectionReport<K> out;
  out.section = basis.front();
  Module<K> satm = present_subquotient(A.split.bidual.ambient, A.sat, {});
  // quotient by the section: express s in the saturated generators
  SyzResult<K> S = groebner_with_syzygies(R, A.sat, A.split.bidual.ambient.rank());
  auto lift = express_in(out.section, S, R);
  if (!lift) throw std::logic_error("free_summand_section: section not in saturation");
  Module<K> Q = satm;
  Vec<K> sv = *lift;
  vec_sort(sv, top_order<K>(R));
  Q.rel.push_back(sv);
  out.quotient = Q;

  // torsion-free check and ideal extraction via the bidual of the quotient
  TorsionSplit<K> qsplit = torsion_split(Q);
  if (!is_zero_module(qsplit.torsion))
    throw std::logic_error("free_summand_section: quotient has torsion");
  auto mp = minimal_presentation(qsplit.bidual.dd);
  if (mp.M.F.rank() != 1 || !mp.M.rel.empty())
    throw std::logic_error("free_summand_section: quotient bidual is not a line bundle");

  // 0 -> O -> F -> I_W(0) -> 0 with c2(F) = len(W); the saturated ideal of W
  // is recovered as the first Fitting ideal of the quotient.
  out.twist = 0;
  std::vector<Poly<K>> fitt = fitting_ideal(minimal_presentation(Q).M, 1);
  FreeModule amb1 = FreeModule::trivial(R, 1);
  ModOrder ord = top_order<K>(R);
  std::vector<Vec<K>> fv;
  for (const auto& f : fitt)
    if (!f.is_zero()) {
      Vec<K> v;
      for (const auto& [m, c] : f.terms()) v.t.push_back({m, 0, c});
      vec_sort(v, ord);
      fv.push_back(v);
    }
  std::vector<Vec<K>> sat_ideal = saturate_submodule(amb1, fv, irrelevant_ideal<K>(R));
  PolyMatrix<K> cols = columns_to_matrix(R, 1, sat_ideal);
  for (int j = 0; j < cols.cols; ++j) out.ideal_gens.push_back(cols.at(0, j));
  // degree of the subscheme = constant HP of R/I
  Module<K> quot;
  quot.F = amb1;
  quot.rel = sat_ideal;
  auto hp = hilbert_polynomial(quot);
  if (!hp.coeff.empty() && hp.coeff[0].is_integer())
    out.ideal_colength = hp.coeff[0].num().fits_ll() ? hp.coeff[0].num().to_ll() : -1;
  for (size_t i = 1; i < hp.coeff.size(); ++i)
    if (!hp.coeff[i].is_zero())
      throw std::logic_error("free_summand_section: quotient ideal not 0-dimensional");
  return out;
}

// Canonical sheaf-equality test: Chern data, twisted-section profile over a
// regularity window, and Fitting ideals of the saturated minimal
// presentations (isomorphism invariants of the saturated module).
template <class K>
bool sheaf_equal(const SheafAnalysis<K>& A, const SheafAnalysis<K>& B) {
  ChernData ca = chern(A.M), cb = chern(B.M);
  if (!(ca == cb)) return false;
  Module<K> sa = saturated_presentation(A);
  Module<K> sb = saturated_presentation(B);
  long reg = std::max(regularity_bound(sa), regularity_bound(sb));
  long lo = -std::max<long>(reg, 2) - 2, hi = std::max<long>(reg, 0) + 2;
  for (long d = lo; d <= hi; ++d)
    if (h0(A, d) != h0(B, d)) return false;
  for (int k = 0; k <= 3; ++k) {
    auto fa = fitting_ideal(sa, k);
    auto fb = fitting_ideal(sb, k);
    FreeModule amb1 = FreeModule::trivial(A.M.F.R, 1);
    ModOrder ord = top_order<K>(A.M.F.R);
    auto to_vecs = [&](const std::vector<Poly<K>>& ps) {
      std::vector<Vec<K>> vs;
      for (const auto& p : ps)
        if (!p.is_zero()) {
          Vec<K> v;
          for (const auto& [m, c] : p.terms()) v.t.push_back({m, 0, c});
          vec_sort(v, ord);
          vs.push_back(v);
        }
      return vs;
    };
    if (!spans_equal(A.M.F.R, to_vecs(fa), to_vecs(fb))) return false;
  }
  return true;
}

}  // namespace bubbletree
