#pragma once

// Families of rank-two reflexive sheaves on the germ B: presentation
// validation, restriction to the central plane {z = 0}, multiplicity,
// splitting off the trivial factor, the downstairs elementary modifications,
// and the generic multiplicity sampler over random planes.

#include "blowup.hpp"

namespace bubbletree {

template <class K>
struct FamilyPresentation {
  PolyMatrix<K> A;  // b x a over k[x,y,z], b - a = 2
  std::string label;
};

template <class K>
Module<K> family_module(const BlowupModel<K>& B, const FamilyPresentation<K>& E) {
  Module<K> M;
  M.F = FreeModule(B.base, std::vector<long>(E.A.rows, 0));
  ModOrder ord = top_order<K>(B.base);
  for (int j = 0; j < E.A.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < E.A.rows; ++i)
      for (const auto& [m, c] : E.A.at(i, j).terms()) col.t.push_back({m, i, c});
    vec_sort(col, ord);
    if (!col.is_zero()) M.rel.push_back(col);
  }
  return M;
}

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> errors;
  void fail(const std::string& msg) {
    ok = false;
    errors.push_back(msg);
  }
};

// Check the three standing assumptions: injective presentation, reflexive
// cokernel, and non-locally-free locus contained in the origin.
template <class K>
ValidationReport validate(const BlowupModel<K>& B, const FamilyPresentation<K>& E) {
  ValidationReport rep;
  if (E.A.rows - E.A.cols != 2) {
    rep.fail("presentation is not rank 2 (rows - cols != 2)");
    return rep;
  }
  Module<K> M = family_module(B, E);
  if (static_cast<int>(M.rel.size()) != E.A.cols) {
    rep.fail("zero column in presentation");
    return rep;
  }
  if (!syzygies(B.base, M.rel, M.F.rank()).empty())
    rep.fail("presentation matrix is not injective");

  // reflexivity: canonical map to the bidual is an isomorphism
  BidualResult<K> b = bidual_module(M);
  KernelResult<K> tor = kernel_of_map(M, b.dd, b.can);
  if (!is_zero_module(tor.ker)) rep.fail("cokernel has torsion (not reflexive)");
  Module<K> cokernel = b.dd;
  ModOrder ord = top_order<K>(B.base);
  for (int j = 0; j < b.can.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < b.can.rows; ++i)
      for (const auto& [m, c] : b.can.at(i, j).terms()) col.t.push_back({m, i, c});
    vec_sort(col, ord);
    if (!col.is_zero()) cokernel.rel.push_back(col);
  }
  if (!is_zero_module(cokernel)) rep.fail("cokernel is not reflexive (canonical map not onto)");

  // non-locally-free locus: Fitt_2 of a minimal presentation has support {0}
  Module<K> mp = minimal_presentation(M).M;
  std::vector<Poly<K>> fitt = fitting_ideal(mp, 2);
  Module<K> quot;
  quot.F = FreeModule::trivial(B.base, 1);
  for (const auto& f : fitt) {
    if (f.is_zero()) continue;
    Vec<K> v;
    for (const auto& [m, c] : f.terms()) v.t.push_back({m, 0, c});
    vec_sort(v, ord);
    quot.rel.push_back(v);
  }
  try {
    module_length_at_origin(quot, true);
  } catch (const LengthError& e) {
    rep.fail(std::string("singular locus not confined to the origin: ") + e.what());
  }
  return rep;
}

template <class K>
struct CentralRestriction {
  Module<K> R0;  // over k[x,y]
  bool torsion_free = true;
  long k = 0;  // multiplicity: length of (R0** / R0) at the origin
};

template <class K>
CentralRestriction<K> central_restriction(const BlowupModel<K>& B,
                                          const FamilyPresentation<K>& E) {
  std::vector<Poly<K>> images = {Poly<K>::variable(B.b0, 0), Poly<K>::variable(B.b0, 1),
                                 Poly<K>::zero(B.b0)};
  CentralRestriction<K> out;
  out.R0.F = FreeModule(B.b0, std::vector<long>(E.A.rows, 0));
  ModOrder ord = top_order<K>(B.b0);
  for (int j = 0; j < E.A.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < E.A.rows; ++i) {
      Poly<K> p = E.A.at(i, j).substitute(B.b0, images);
      for (const auto& [m, c] : p.terms()) col.t.push_back({m, i, c});
    }
    vec_sort(col, ord);
    if (!col.is_zero()) out.R0.rel.push_back(col);
  }
  TorsionSplit<K> ts = torsion_split(out.R0);
  out.torsion_free = is_zero_module(ts.torsion);

  Module<K> quotient = ts.bidual.dd;
  for (int j = 0; j < ts.bidual.can.cols; ++j) {
    Vec<K> col;
    for (int i = 0; i < ts.bidual.can.rows; ++i)
      for (const auto& [m, c] : ts.bidual.can.at(i, j).terms()) col.t.push_back({m, i, c});
    vec_sort(col, ord);
    if (!col.is_zero()) quotient.rel.push_back(col);
  }
  out.k = module_length_at_origin(quotient, true);
  return out;
}

template <class K>
struct SplittingWitness {
  Vec<K> section;                 // coordinates of s in the generators of R0
  std::vector<Poly<K>> pi;        // projection R0 -> O with pi(s) = 1, entries in k[x,y]
  Module<K> quotient;             // R0 / <s>
  std::vector<Poly<K>> ideal_gens;  // ideal I with quotient isomorphic to I
  long ideal_colength = 0;
  bool certified_none = false;    // set on the *absence* result when the trace
                                  // ideal lies in the maximal ideal
};

// Search for a free O-summand of a module over a 2-variable germ ring: for
// each generator (constants first) decide by ideal membership whether some
// dual combination evaluates to exactly 1; a trace ideal inside the maximal
// ideal certifies that no splitting exists at the germ.
template <class K>
std::optional<SplittingWitness<K>> find_module_splitting(const RingPtr& R, const Module<K>& R0,
                                                         long degree_bound = 3) {
  DualResult<K> dual = dual_module(R0);
  int b = R0.F.rank();
  int p = static_cast<int>(dual.phis.size());
  PolyMatrix<K> W = columns_to_matrix(R, b, dual.phis);  // W(i,k) = phi_k(e_i)

  ModOrder ord = top_order<K>(R);
  auto attempt = [&](const Vec<K>& s) -> std::optional<SplittingWitness<K>> {
    // values phi_k(s)
    std::vector<Vec<K>> vals;
    for (int k = 0; k < p; ++k) {
      Poly<K> val = Poly<K>::zero(R);
      for (const auto& t : s.t) val = val + W.at(t.pos, k).mul_term(t.m, t.c);
      Vec<K> v;
      for (const auto& [m, c] : val.terms()) v.t.push_back({m, 0, c});
      vec_sort(v, ord);
      vals.push_back(std::move(v));
    }
    SyzResult<K> S = groebner_with_syzygies(R, vals, 1);
    auto lift = express_in(vec_unit<K>(R, 0), S, R);
    if (!lift) return std::nullopt;
    SplittingWitness<K> w;
    w.section = s;
    w.pi.assign(b, Poly<K>::zero(R));
    for (const auto& t : lift->t) {
      // pi = sum u_k phi_k with u_k = lift coefficient at position k
      for (int i = 0; i < b; ++i)
        w.pi[i] = w.pi[i] + W.at(i, t.pos).mul_term(t.m, t.c);
    }
    // exact check pi(s) = 1
    Poly<K> check = Poly<K>::zero(R);
    for (const auto& t : s.t) check = check + w.pi[t.pos].mul_term(t.m, t.c);
    if (check != Poly<K>::constant(R, K(1)))
      throw std::logic_error("find_splitting: witness failed exact verification");
    // quotient and its ideal model
    Module<K> Q = R0;
    Vec<K> sv = s;
    vec_sort(sv, ord);
    Q.rel.push_back(sv);
    TorsionSplit<K> qs = torsion_split(Q);
    if (!is_zero_module(qs.torsion))
      throw std::logic_error("find_splitting: quotient by the section has torsion");
    Module<K> qmin = minimal_presentation(Q).M;
    w.quotient = qmin;
    for (const auto& f : fitting_ideal(qmin, 1))
      if (!f.is_zero()) w.ideal_gens.push_back(f);
    Module<K> quot;
    quot.F = FreeModule::trivial(R, 1);
    for (const auto& f : w.ideal_gens) {
      Vec<K> v;
      for (const auto& [m, c] : f.terms()) v.t.push_back({m, 0, c});
      vec_sort(v, ord);
      quot.rel.push_back(v);
    }
    w.ideal_colength = module_length_at_origin(quot, true);
    return w;
  };

  // candidates: single generators first, then unit-coefficient pairs
  for (int i = 0; i < b; ++i) {
    auto w = attempt(vec_unit<K>(R, i));
    if (w) return w;
  }
  // pairs of generators with unit coefficients
  for (int i = 0; i < b; ++i)
    for (int j = i + 1; j < b; ++j)
      for (int sgn : {1, -1}) {
        Vec<K> s = vec_unit<K>(R, i);
        Vec<K> e = vec_unit<K>(R, j);
        for (auto& t : e.t) t.c = K(sgn);
        s = vec_add(s, e, ord);
        auto w = attempt(s);
        if (w) return w;
      }
  (void)degree_bound;

  return std::nullopt;
}

template <class K>
std::optional<SplittingWitness<K>> find_splitting(const BlowupModel<K>& B,
                                                  const CentralRestriction<K>& CR,
                                                  long degree_bound = 3) {
  if (!CR.torsion_free) throw std::invalid_argument("find_splitting: restriction has torsion");
  return find_module_splitting(B.b0, CR.R0, degree_bound);
}

// Whether the absence of a splitting is certified (trace ideal in the
// maximal ideal of the germ) rather than a bounded-search miss.
template <class K>
bool module_trace_in_max_ideal(const RingPtr& R, const Module<K>& R0) {
  DualResult<K> dual = dual_module(R0);
  PolyMatrix<K> W = columns_to_matrix(R, R0.F.rank(), dual.phis);
  for (int i = 0; i < W.rows; ++i)
    for (int k = 0; k < W.cols; ++k)
      for (const auto& [m, c] : W.at(i, k).terms())
        if (m.is_one()) return false;
  return true;
}

template <class K>
bool no_splitting_certified(const BlowupModel<K>& B, const CentralRestriction<K>& CR) {
  return module_trace_in_max_ideal(B.b0, CR.R0);
}

enum class ModifyDirection { ideal_factor, trivial_factor };

inline const char* to_string(ModifyDirection d) {
  return d == ModifyDirection::ideal_factor ? "ideal_factor" : "trivial_factor";
}

// Elementary modification downstairs: the kernel of E -> i_*(factor), where
// the factor of E|_{B0} = O + I named by the direction is the quotient.
template <class K>
FamilyPresentation<K> modify_family(const BlowupModel<K>& B, const FamilyPresentation<K>& E,
                                    const SplittingWitness<K>& w, ModifyDirection dir) {
  const RingPtr& base = B.base;
  Module<K> M = family_module(B, E);
  ModOrder ord = top_order<K>(base);
  std::vector<Poly<K>> lift = {Poly<K>::variable(base, 0), Poly<K>::variable(base, 1)};

  Module<K> target;
  PolyMatrix<K> phi(base, 0, 0);
  Poly<K> z = Poly<K>::variable(base, 2);
  if (dir == ModifyDirection::ideal_factor) {
    // target = i_*(R0 / <s>), map = reduction mod z followed by the quotient;
    // relations: central restriction columns, the section, and z * generators
    int b = M.F.rank();
    target.F = FreeModule(base, std::vector<long>(b, 0));
    std::vector<Poly<K>> images = {Poly<K>::variable(base, 0), Poly<K>::variable(base, 1),
                                   Poly<K>::zero(base)};
    for (int j = 0; j < E.A.cols; ++j) {
      Vec<K> col;
      for (int i = 0; i < b; ++i) {
        Poly<K> p = E.A.at(i, j).substitute(base, images);
        for (const auto& [m, c] : p.terms()) col.t.push_back({m, i, c});
      }
      vec_sort(col, ord);
      if (!col.is_zero()) target.rel.push_back(col);
    }
    {
      Vec<K> s;
      for (const auto& t : w.section.t) {
        Monomial m(3);
        m.e[0] = t.m.e[0];
        m.e[1] = t.m.e[1];
        s.t.push_back({m, t.pos, t.c});
      }
      vec_sort(s, ord);
      target.rel.push_back(s);
    }
    for (int i = 0; i < b; ++i) {
      Vec<K> v;
      Monomial m(3);
      m.e[2] = 1;
      v.t.push_back({m, i, K(1)});
      target.rel.push_back(v);
    }
    phi = PolyMatrix<K>(base, b, b);
    for (int i = 0; i < b; ++i) phi.at(i, i) = Poly<K>::constant(base, K(1));
  } else {
    // target = i_* O_{B0}, map = pi composed with reduction mod z
    target.F = FreeModule::trivial(base, 1);
    Vec<K> zv;
    {
      Monomial m(3);
      m.e[2] = 1;
      zv.t.push_back({m, 0, K(1)});
    }
    target.rel.push_back(zv);
    phi = PolyMatrix<K>(base, 1, M.F.rank());
    for (int i = 0; i < M.F.rank(); ++i)
      phi.at(0, i) = w.pi[i].substitute(base, lift);
  }

  // surjectivity of the map of cokernels
  {
    Module<K> coker_check = target;
    for (int j = 0; j < phi.cols; ++j) {
      Vec<K> col;
      for (int i = 0; i < phi.rows; ++i)
        for (const auto& [m, c] : phi.at(i, j).terms()) col.t.push_back({m, i, c});
      vec_sort(col, ord);
      if (!col.is_zero()) coker_check.rel.push_back(col);
    }
    if (!is_zero_module(coker_check))
      throw std::logic_error("modify_family: stale witness (map not surjective)");
  }

  KernelResult<K> ker = kernel_of_map(M, target, phi);
  Module<K> pruned = minimal_presentation(ker.ker).M;
  FamilyPresentation<K> out;
  out.A = rel_matrix(pruned);
  out.label = E.label + (dir == ModifyDirection::ideal_factor ? " /I" : " /O");
  return out;
}

// Compare two presentations as families: same shape after minimization and
// column spans equal up to a permutation of the ambient generators.
template <class K>
bool presentation_gb_equal(const BlowupModel<K>& B, const PolyMatrix<K>& A0,
                           const PolyMatrix<K>& B0) {
  auto norm = [&](const PolyMatrix<K>& X) {
    Module<K> M;
    M.F = FreeModule(B.base, std::vector<long>(X.rows, 0));
    ModOrder ord = top_order<K>(B.base);
    for (int j = 0; j < X.cols; ++j) {
      Vec<K> col;
      for (int i = 0; i < X.rows; ++i)
        for (const auto& [m, c] : X.at(i, j).terms()) col.t.push_back({m, i, c});
      vec_sort(col, ord);
      if (!col.is_zero()) M.rel.push_back(col);
    }
    return minimal_presentation(M).M;
  };
  Module<K> MA = norm(A0), MB = norm(B0);
  if (MA.F.rank() != MB.F.rank() || MA.rel.size() != MB.rel.size()) return false;
  int b = MA.F.rank();
  std::vector<int> perm(b);
  for (int i = 0; i < b; ++i) perm[i] = i;
  ModOrder ord = top_order<K>(B.base);
  do {
    std::vector<Vec<K>> permuted;
    for (const auto& col : MB.rel) {
      Vec<K> v;
      for (const auto& t : col.t) v.t.push_back({t.m, perm[t.pos], t.c});
      vec_sort(v, ord);
      permuted.push_back(v);
    }
    if (spans_equal(B.base, MA.rel, permuted)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Generic multiplicity: recompute the multiplicity after seeded random linear
// changes of coordinates sending a random plane through 0 to {z = 0}.
struct KgSample {
  long k = 0;
  bool degenerate = false;
  std::vector<long> plane;  // coefficients of the sampled plane a x + b y + c z
};

template <class K>
struct GenericMultiplicity {
  long k_g = 0;
  std::vector<KgSample> samples;
  long resampled = 0;
};

inline uint64_t splitmix64(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class K>
GenericMultiplicity<K> generic_multiplicity(const BlowupModel<K>& B,
                                            const FamilyPresentation<K>& E, int samples,
                                            uint64_t seed) {
  GenericMultiplicity<K> out;
  uint64_t state = seed ^ 0x5bd1e9955bd1e995ULL;
  auto small = [&]() { return static_cast<long>(splitmix64(state) % 7) - 3; };

  int accepted = 0;
  int guard = 0;
  while (accepted < samples) {
    if (++guard > samples * 20)
      throw std::runtime_error("generic_multiplicity: too many degenerate samples");
    // random plane a x + b y + c z and a completion to an invertible change
    long a = small(), b = small(), c = small();
    if (a == 0 && b == 0 && c == 0) continue;
    long g[3][3] = {{small(), small(), small()}, {small(), small(), small()}, {a, b, c}};
    long det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
               g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
               g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    if (det == 0) continue;
    // old coordinates in terms of new: inverse of g (adjugate / det)
    Rational inv[3][3];
    long adj[3][3] = {
        {g[1][1] * g[2][2] - g[1][2] * g[2][1], g[0][2] * g[2][1] - g[0][1] * g[2][2],
         g[0][1] * g[1][2] - g[0][2] * g[1][1]},
        {g[1][2] * g[2][0] - g[1][0] * g[2][2], g[0][0] * g[2][2] - g[0][2] * g[2][0],
         g[0][2] * g[1][0] - g[0][0] * g[1][2]},
        {g[1][0] * g[2][1] - g[1][1] * g[2][0], g[0][1] * g[2][0] - g[0][0] * g[2][1],
         g[0][0] * g[1][1] - g[0][1] * g[1][0]}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) inv[i][j] = Rational(adj[i][j]) / Rational(det);

    std::vector<Poly<K>> exact_images;
    for (int i = 0; i < 3; ++i) {
      Poly<K> p = Poly<K>::zero(B.base);
      for (int j = 0; j < 3; ++j) {
        if constexpr (std::is_same_v<K, Rational>) {
          p = p + Poly<K>::variable(B.base, j).scale(inv[i][j]);
        } else {
          K num(adj[i][j]);
          K den(det);
          p = p + Poly<K>::variable(B.base, j).scale(num / den);
        }
      }
      exact_images.push_back(p);
    }

    FamilyPresentation<K> EL;
    EL.A = PolyMatrix<K>(B.base, E.A.rows, E.A.cols);
    for (int i = 0; i < E.A.rows; ++i)
      for (int j = 0; j < E.A.cols; ++j)
        EL.A.at(i, j) = E.A.at(i, j).substitute(B.base, exact_images);
    EL.label = E.label + " (plane sample)";

    CentralRestriction<K> cr = central_restriction(B, EL);
    KgSample s;
    s.plane = {a, b, c};
    if (!cr.torsion_free) {
      s.degenerate = true;
      ++out.resampled;
      out.samples.push_back(s);
      continue;
    }
    s.k = cr.k;
    out.samples.push_back(s);
    ++accepted;
  }
  long kg = -1;
  for (const auto& s : out.samples)
    if (!s.degenerate) kg = kg < 0 ? s.k : std::min(kg, s.k);
  out.k_g = kg;
  return out;
}

}  // namespace bubbletree
