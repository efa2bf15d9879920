#pragma once

// End-to-end drivers: the semistabilization loop (normalized semistable
// extension), barren/cone/fertile classification with the discriminant
// equivalences enforced as hard consistency checks, bubble reports, and the
// two-stage normalization ladder to a fertile family.

#include "family.hpp"

namespace bubbletree {

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FamilyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SemistabStep {
  long delta_before = 0;
  long delta_after = 0;
  long deg_L = 0;
  long deg_Q = 0;
};

template <class K>
struct SemistableExtension {
  BlowupModule<K> M;         // normalized semistable extension
  Module<K> restriction;     // its exceptional restriction
  ChernData ch;              // c1 in {0, -1}
  Stability stability = Stability::strictly_semistable;
  std::vector<SemistabStep> trace;
  long initial_delta = 0;
};

struct PipelineOptions {
  int max_steps = 0;        // 0: use the 4k + 8 default
  long degree_bound = 3;    // splitting search bound
  long pushforward_bound = 0;  // 0: 2 * max entry degree + 6
  int kg_samples = 5;
  uint64_t seed = 0;
};

template <class K>
long normalize_c1(const BlowupModel<K>& B, BlowupModule<K>& M) {
  ChernData ch = chern(exceptional_restriction(B, M));
  long t = ch.c1 % 2 == 0 ? ch.c1 / 2 : (ch.c1 + 1) / 2;
  if (t != 0) M = twist(M, t);
  return t;
}

// Semistabilization loop: starting from an extension, modify along the maximal
// destabilizer until the exceptional restriction is semistable, renormalizing
// c1 into {0, -1} after every step. Delta strictly increases by exactly
// 2(deg L - deg Q) - 1 per step and is capped by 4k.
template <class K>
SemistableExtension<K> semistabilize_from(const BlowupModel<K>& B, BlowupModule<K> M, long k,
                                          int max_steps = 0) {
  if (max_steps <= 0) max_steps = static_cast<int>(4 * k + 8);
  SemistableExtension<K> out;
  normalize_c1(B, M);
  Module<K> F = exceptional_restriction(B, M);
  ChernData ch = chern(F);
  out.initial_delta = ch.delta();

  bool hulled = false;
  for (int step = 0;; ++step) {
    SheafAnalysis<K> A = analyze_sheaf(F);
    if (!A.torsion_zero) {
      // a non-reflexive extension candidate: pass to the reflexive hull once
      if (hulled) throw FamilyError("semistabilize: exceptional restriction has torsion");
      hulled = true;
      M = reflexive_hull(B, M);
      normalize_c1(B, M);
      F = exceptional_restriction(B, M);
      ch = chern(F);
      out.initial_delta = std::min(out.initial_delta, ch.delta());
      --step;
      continue;
    }
    Stability st = is_semistable(A, ch);
    if (st != Stability::unstable) {
      out.M = M;
      out.restriction = F;
      out.ch = ch;
      out.stability = st;
      return out;
    }
    if (step >= max_steps)
      throw ConsistencyError("semistabilize: iteration cap exceeded");
    Destabilizer<K> d = max_destabilizer(A, ch);
    long delta_before = ch.delta();
    M = elementary_modification_up(B, M, d.Q, d.surjection);
    normalize_c1(B, M);
    F = exceptional_restriction(B, M);
    ch = chern(F);
    SemistabStep s;
    s.delta_before = delta_before;
    s.delta_after = ch.delta();
    s.deg_L = d.deg_L;
    s.deg_Q = d.deg_Q;
    out.trace.push_back(s);
    if (s.delta_after != delta_before + 2 * (d.deg_L - d.deg_Q) - 1)
      throw ConsistencyError("semistabilize: discriminant step formula violated");
    if (s.delta_after < delta_before + 1)
      throw ConsistencyError("semistabilize: discriminant did not increase");
    if (ch.delta() > 4 * k)
      throw ConsistencyError("semistabilize: discriminant exceeded 4k (loop guard)");
  }
}

template <class K>
SemistableExtension<K> semistabilize(const BlowupModel<K>& B, const FamilyPresentation<K>& E,
                                     long k, int max_steps = 0) {
  return semistabilize_from(B, naive_extension(B, E.A), k, max_steps);
}

enum class Verdict { barren, cone, fertile };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::barren: return "barren";
    case Verdict::cone: return "cone";
    case Verdict::fertile: return "fertile";
  }
  return "?";
}

template <class K>
struct ClassificationReport {
  Verdict verdict = Verdict::barren;
  long k = 0;
  long k_g = 0;
  ChernData bubble_chern;          // of the normalized semistable restriction
  Stability stability = Stability::strictly_semistable;
  SplittingType p1_split;
  bool trivial_at_infinity = false;
  bool bidual_free = false;
  std::vector<SemistabStep> trace;
  GenericMultiplicity<K> kg_detail;
  SemistableExtension<K> extension;
};

// Structural cross-checks, enforced as hard errors: the classification
// theory makes a violation impossible, so any occurrence is a bug.
template <class K>
void enforce_equivalences(const ClassificationReport<K>& r) {
  bool delta_matches_4k = r.bubble_chern.delta() == 4 * r.k;
  if (r.trivial_at_infinity != delta_matches_4k)
    throw ConsistencyError(
        "classification: [P1 splitting trivial] and [Delta = 4k] disagree");
  // c1 = 0 and c2 = k is the same statement in normalized form
  if (r.trivial_at_infinity &&
      !(r.bubble_chern.c1 == 0 && r.bubble_chern.c2 == r.k))
    throw ConsistencyError("classification: trivial at infinity but (c1, c2) != (0, k)");
  long c2_bound = r.k;  // Delta <= 4k gives c2 <= k for c1 in {0,-1}
  if (r.bubble_chern.c2 > c2_bound)
    throw ConsistencyError("classification: c2 exceeds the multiplicity");
  if (r.k_g != r.bubble_chern.c2)
    throw ConsistencyError("classification: generic multiplicity != c2");
  if (r.k_g > r.k)
    throw ConsistencyError("classification: k_g exceeds k (semicontinuity)");
  for (const auto& s : r.trace)
    if (s.delta_after <= s.delta_before)
      throw ConsistencyError("classification: discriminant trace not strictly increasing");
}

template <class K>
ClassificationReport<K> classify(const BlowupModel<K>& B, const FamilyPresentation<K>& E,
                                 const PipelineOptions& opt = {}) {
  ValidationReport val = validate(B, E);
  if (!val.ok) {
    std::string msg = "invalid family";
    for (const auto& e : val.errors) msg += "; " + e;
    throw FamilyError(msg);
  }
  CentralRestriction<K> cr = central_restriction(B, E);
  ClassificationReport<K> out;
  out.k = cr.k;
  out.kg_detail = generic_multiplicity(B, E, opt.kg_samples, opt.seed);
  out.k_g = out.kg_detail.k_g;

  SemistableExtension<K> se = semistabilize(B, E, cr.k, opt.max_steps);
  out.extension = se;
  out.trace = se.trace;
  out.bubble_chern = se.ch;
  out.stability = se.stability;

  StrictRestriction<K> sr = restrict_to_strict_transform(B, se.M);
  out.p1_split = p1_splitting_type(sr.on_p1);
  out.trivial_at_infinity = out.p1_split.trivial();

  // cross-check: the P1 restriction through the strict transform agrees with
  // restricting the exceptional sheaf to the line {Z = 0}
  SplittingType via_line =
      restrict_to_line(se.restriction, Poly<K>::variable(B.p2, 2));
  if (!(via_line == out.p1_split))
    throw ConsistencyError("classification: strict-transform and line restrictions disagree");

  SheafAnalysis<K> A = analyze_sheaf(se.restriction);
  auto ddmin = minimal_presentation(A.split.bidual.dd);
  out.bidual_free = ddmin.M.rel.empty();

  out.verdict = !out.trivial_at_infinity
                    ? Verdict::barren
                    : (out.bidual_free ? Verdict::cone : Verdict::fertile);
  enforce_equivalences(out);
  return out;
}

template <class K>
struct BubbleReport {
  ChernData ch;
  bool locally_free = false;
  std::vector<SingularPoint> singular;
  long smooth_charge = 0;  // c2 of the double dual
  std::optional<SectionReport<K>> section;
  std::string tree_summary;
  long h0_bubble = 0;
};

template <class K>
BubbleReport<K> bubble_report(const BlowupModel<K>& B, const ClassificationReport<K>& cls) {
  if (cls.verdict == Verdict::barren)
    throw FamilyError("bubble_report: family is barren");
  const Module<K>& F = cls.extension.restriction;
  SheafAnalysis<K> A = analyze_sheaf(F);
  BubbleReport<K> out;
  out.ch = cls.bubble_chern;
  if (out.ch.c2 != cls.k)
    throw ConsistencyError("bubble_report: c2 != k on a non-barren family");
  out.singular = singular_points(A, out.ch);
  out.locally_free = out.singular.empty();
  out.smooth_charge = chern(A.split.bidual.dd).c2;
  long charge_sum = 0;
  for (const auto& p : out.singular) charge_sum += p.local_charge * p.residue_degree;
  if (charge_sum + out.smooth_charge != out.ch.c2)
    throw ConsistencyError("bubble_report: local charges + smooth charge != c2");
  out.h0_bubble = h0(A, 0);
  if (out.h0_bubble > 0) out.section = free_summand_section(A, out.ch);
  out.tree_summary = out.locally_free
                         ? "height 1 (bubble locally free)"
                         : "height >= 2 (singular bubble; local models reported)";
  return out;
}

template <class K>
struct NormalizationStep {
  ModifyDirection direction;
  std::string family_label;
  PolyMatrix<K> presentation;
  Verdict verdict_after;
  long delta_after = 0;
  long k_after = 0;
};

template <class K>
struct NormalizationTrace {
  std::vector<NormalizationStep<K>> steps;
  int stage_a_steps = 0;
  int stage_b_steps = 0;
  FamilyPresentation<K> final_family;
  ClassificationReport<K> final_report;
};

// Normalization driver: Stage A applies ideal_factor modifications while the
// family is barren; Stage B applies trivial_factor modifications while it is
// a cone; stops at the first fertile family. k stays constant, Delta is
// non-decreasing in Stage A and constant in Stage B, and consecutive Stage-A
// cone sheaves agree.
template <class K>
NormalizationTrace<K> normalize_to_fertile(const BlowupModel<K>& B, FamilyPresentation<K> E,
                                           const PipelineOptions& opt = {}) {
  NormalizationTrace<K> out;
  ClassificationReport<K> cls = classify(B, E, opt);
  long k0 = cls.k;
  int cap = opt.max_steps > 0 ? opt.max_steps : static_cast<int>(4 * k0 + 8);

  auto witness_or_fail = [&](const FamilyPresentation<K>& fam) {
    CentralRestriction<K> cr = central_restriction(B, fam);
    if (!cr.torsion_free)
      throw FamilyError("normalize_to_fertile: central restriction has torsion");
    auto w = find_splitting(B, cr, opt.degree_bound);
    if (!w)
      throw FamilyError(out.steps.empty()
                            ? "normalize_to_fertile: no O + I splitting found"
                            : "normalize_to_fertile: splitting lost along the ladder");
    return *w;
  };

  // Stage A: barren -> non-barren via ideal_factor
  long last_delta = cls.bubble_chern.delta();
  while (cls.verdict == Verdict::barren) {
    if (out.stage_a_steps >= cap)
      throw ConsistencyError("normalize_to_fertile: Stage A step cap exceeded");
    SplittingWitness<K> w = witness_or_fail(E);
    E = modify_family(B, E, w, ModifyDirection::ideal_factor);
    cls = classify(B, E, opt);
    if (cls.k != k0)
      throw ConsistencyError("normalize_to_fertile: multiplicity changed in Stage A");
    if (cls.bubble_chern.delta() < last_delta)
      throw ConsistencyError("normalize_to_fertile: Delta decreased in Stage A");
    last_delta = cls.bubble_chern.delta();
    NormalizationStep<K> step;
    step.direction = ModifyDirection::ideal_factor;
    step.family_label = E.label;
    step.presentation = E.A;
    step.verdict_after = cls.verdict;
    step.delta_after = last_delta;
    step.k_after = cls.k;
    out.steps.push_back(step);
    ++out.stage_a_steps;
  }

  // Stage B: cone -> fertile via trivial_factor; Delta stays constant and the
  // cone sheaves along the way are pairwise sheaf-equal
  std::optional<SheafAnalysis<K>> prev_cone;
  if (cls.verdict == Verdict::cone) prev_cone = analyze_sheaf(cls.extension.restriction);
  while (cls.verdict == Verdict::cone) {
    if (out.stage_b_steps >= cap)
      throw ConsistencyError("normalize_to_fertile: Stage B step cap exceeded");
    SplittingWitness<K> w = witness_or_fail(E);
    E = modify_family(B, E, w, ModifyDirection::trivial_factor);
    cls = classify(B, E, opt);
    if (cls.k != k0)
      throw ConsistencyError("normalize_to_fertile: multiplicity changed in Stage B");
    if (cls.bubble_chern.delta() != last_delta)
      throw ConsistencyError("normalize_to_fertile: Delta changed in Stage B");
    // every Stage-B semistable restriction carries the O-section shape
    {
      SheafAnalysis<K> A = analyze_sheaf(cls.extension.restriction);
      if (h0(A, 0) == 0)
        throw ConsistencyError("normalize_to_fertile: Stage B restriction lost its section");
      if (cls.verdict == Verdict::cone) {
        if (prev_cone && !sheaf_equal(*prev_cone, A))
          throw ConsistencyError("normalize_to_fertile: consecutive cones not sheaf-equal");
        prev_cone = A;
      }
    }
    NormalizationStep<K> step;
    step.direction = ModifyDirection::trivial_factor;
    step.family_label = E.label;
    step.presentation = E.A;
    step.verdict_after = cls.verdict;
    step.delta_after = cls.bubble_chern.delta();
    step.k_after = cls.k;
    out.steps.push_back(step);
    ++out.stage_b_steps;
  }

  if (cls.verdict != Verdict::fertile)
    throw ConsistencyError("normalize_to_fertile: driver ended on a non-fertile family");
  out.final_family = E;
  out.final_report = cls;
  return out;
}

// Uniqueness of the normalized semistable extension: a second feasible twist
// assignment must converge to a sheaf-equal exceptional restriction.
template <class K>
bool semistabilization_unique(const BlowupModel<K>& B, const FamilyPresentation<K>& E, long k) {
  SemistableExtension<K> a = semistabilize(B, E, k);
  TwistAssignment zero;
  zero.row.assign(E.A.rows, 0);
  std::vector<long> scol;
  // feasible: s_j = min over rows of ord of nonzero entries
  for (int j = 0; j < E.A.cols; ++j) {
    long s = -1;
    for (int i = 0; i < E.A.rows; ++i) {
      if (E.A.at(i, j).is_zero()) continue;
      long o = E.A.at(i, j).order_at_origin();
      s = s < 0 ? o : std::min(s, o);
    }
    scol.push_back(std::max<long>(s, 0));
  }
  zero.col = scol;
  SemistableExtension<K> b =
      semistabilize_from(B, naive_extension_with_twists(B, E.A, zero), k);
  return sheaf_equal(analyze_sheaf(a.restriction), analyze_sheaf(b.restriction));
}

}  // namespace bubbletree
