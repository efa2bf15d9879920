#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bubbletree/p2.hpp"
#include "testutil.hpp"

using namespace bubbletree;
using K = Rational;

static RingPtr P2R() { return make_ring({"X", "Y", "Z"}, {1, 1, 1}); }

static Module<K> coker(const RingPtr& R, const std::vector<std::vector<std::string>>& rows,
                       std::vector<long> gen_degrees) {
  int b = static_cast<int>(rows.size());
  int a = static_cast<int>(rows[0].size());
  Module<K> M;
  M.F = FreeModule(R, gen_degrees);
  ModOrder ord = top_order<K>(R);
  for (int j = 0; j < a; ++j) {
    Vec<K> col;
    for (int i = 0; i < b; ++i) {
      Poly<K> p = parse_poly<K>(R, rows[i][j]);
      for (const auto& [m, c] : p.terms()) col.t.push_back({m, i, c});
    }
    vec_sort(col, ord);
    if (!col.is_zero()) M.rel.push_back(col);
  }
  return M;
}

static Module<K> structure_sheaf(const RingPtr& R, long twist = 0) {
  Module<K> M;
  M.F = FreeModule(R, {-twist});
  return M;
}

// charge-1 instanton bubble: coker(O(-2) --(X,Y,Z^2)--> O(-1)^2 + O)
static Module<K> instanton1(const RingPtr& R) {
  return coker(R, {{"X"}, {"Y"}, {"Z^2"}}, {1, 1, 0});
}

// T_P2(-2) = coker(O(-2) --(X,Y,Z)--> O(-1)^3)
static Module<K> tangent_m2(const RingPtr& R) {
  return coker(R, {{"X"}, {"Y"}, {"Z"}}, {1, 1, 1});
}

TEST_CASE("h0 of twisted structure and ideal sheaves") {
  auto R = P2R();
  auto A = analyze_sheaf(structure_sheaf(R));
  CHECK(h0(A, 2) == 6);
  CHECK(h0(A, 0) == 1);
  CHECK(h0(A, -1) == 0);

  // ideal sheaf of [0,0,1]: h0(I(1)) = 2 (pencil of lines through the point)
  Module<K> I = coker(R, {{"-Y"}, {"X"}}, {1, 1});
  auto AI = analyze_sheaf(I);
  CHECK(h0(AI, 1) == 2);
  CHECK(h0(AI, 2) == 5);

  // Euler-sequence graded pieces: h0(T(-2)) = 0, h0(T(-1)) = 3, h0(T) = 8
  auto AT = analyze_sheaf(tangent_m2(R));
  CHECK(h0(AT, 0) == 0);
  CHECK(h0(AT, 1) == 3);
  CHECK(h0(AT, 2) == 8);
}

TEST_CASE("chern data: twists, instanton, height-two bubble") {
  auto R = P2R();
  for (long a : {-2L, 0L, 3L}) {
    ChernData c = chern(structure_sheaf(R, a));
    CHECK(c.rank == 1);
    CHECK(c.c1 == a);
    CHECK(c.c2 == 0);
    CHECK(c.delta() == -a * a);
  }
  {
    ChernData c = chern(instanton1(R));
    CHECK(c.rank == 2);
    CHECK(c.c1 == 0);
    CHECK(c.c2 == 1);
    CHECK(c.delta() == 4);
  }
  {
    ChernData c = chern(tangent_m2(R));
    CHECK(c.rank == 2);
    CHECK(c.c1 == -1);
    CHECK(c.c2 == 1);
    CHECK(c.delta() == 3);
  }
  {
    // (X, Y^2, a Z^3 + b Y Z^2) normalized bubble of the multiplicity-2 family
    Module<K> M = coker(R, {{"X"}, {"Y^2"}, {"Y*Z^2"}}, {2, 1, 0});
    ChernData c = chern(M);
    CHECK(c.rank == 2);
    CHECK(c.c1 == 0);
    CHECK(c.c2 == 2);
    CHECK(c.delta() == 8);
  }
}

TEST_CASE("Whitney additivity on constructed exact sequences") {
  auto R = P2R();
  // 0 -> O(-1) -> O^2 ... use 0 -> O -> O + I_pt-type: direct sums suffice plus
  // the Koszul sequence 0 -> O(-2) -> O(-1)^2 -> I_pt -> 0.
  Module<K> Ipt = coker(R, {{"-Y"}, {"X"}}, {1, 1});
  ChernData cI = chern(Ipt);
  CHECK(cI.rank == 1);
  CHECK(cI.c1 == 0);
  CHECK(cI.c2 == 1);
  // direct sum O + I_pt
  Module<K> sum = coker(R, {{"-Y"}, {"X"}, {"0"}}, {1, 1, 0});
  ChernData cs = chern(sum);
  ChernData cO = chern(structure_sheaf(R));
  CHECK(cs.rank == cI.rank + cO.rank);
  CHECK(cs.c1 == cI.c1 + cO.c1);
  CHECK(cs.c2 == cI.c2 + cO.c2 + cI.c1 * cO.c1);

  // Koszul: O(-2) -> O(-1)^2 with cokernel I_pt: Whitney on the 2-term piece
  ChernData k0 = chern(structure_sheaf(R, -2));
  ChernData k1 = chern(coker(R, {{"0"}}, std::vector<long>{1, 1}));  // O(-1)^2
  CHECK(k1.rank - k0.rank == cI.rank);
  CHECK(k1.c1 - k0.c1 == cI.c1);
  // c2 via Whitney for the quotient: c(F0) = c(F1) c(Q)
  CHECK(k1.c2 == k0.c2 + cI.c2 + k0.c1 * cI.c1);
}

TEST_CASE("semistability verdicts") {
  auto R = P2R();
  {
    // O + O strictly semistable
    Module<K> M;
    M.F = FreeModule(R, {0, 0});
    auto A = analyze_sheaf(M);
    CHECK(is_semistable(A, chern(M)) == Stability::strictly_semistable);
  }
  {
    // T_P2(-2): stable of odd degree
    Module<K> M = tangent_m2(R);
    auto A = analyze_sheaf(M);
    CHECK(is_semistable(A, chern(M)) == Stability::stable);
  }
  {
    // O(1) + O(-1) unstable
    Module<K> M;
    M.F = FreeModule(R, {-1, 1});
    auto A = analyze_sheaf(M);
    CHECK(is_semistable(A, chern(M)) == Stability::unstable);
  }
  {
    // charge-1 instanton: strictly semistable (it has a section)
    Module<K> M = instanton1(R);
    auto A = analyze_sheaf(M);
    CHECK(is_semistable(A, chern(M)) == Stability::strictly_semistable);
  }
}

TEST_CASE("max destabilizer finds the largest line subsheaf") {
  auto R = P2R();
  {
    Module<K> M;
    M.F = FreeModule(R, {-1, 1});  // O(1) + O(-1)
    auto A = analyze_sheaf(M);
    Destabilizer<K> d = max_destabilizer(A, chern(M));
    CHECK(d.deg_L == 1);
    CHECK(d.deg_Q == -1);
    ChernData cq = chern(d.Q);
    CHECK(cq.rank == 1);
    CHECK(cq.c1 == -1);
    CHECK(is_zero_module(torsion_submodule(d.Q).ker));  // quotient torsion-free
  }
  {
    Module<K> M;
    M.F = FreeModule(R, {-2, 0});  // O(2) + O
    auto A = analyze_sheaf(M);
    // c1 = 2: normalize by twisting to c1 = 0: O(1) + O(-1)
    Module<K> N = twist_module(M, 1);
    auto AN = analyze_sheaf(N);
    Destabilizer<K> d = max_destabilizer(AN, chern(N));
    CHECK(d.deg_L == 1);
  }
  {
    // O(1) + I_pt(-1): destabilizer is the line-bundle factor O(1)
    Module<K> M = coker(R, {{"0"}, {"-Y"}, {"X"}}, {-1, 2, 2});
    auto A = analyze_sheaf(M);
    ChernData c = chern(M);
    CHECK(c.rank == 2);
    CHECK(c.c1 == 0);
    Destabilizer<K> d = max_destabilizer(A, c);
    CHECK(d.deg_L == 1);
    CHECK(d.deg_Q == -1);
  }
}

TEST_CASE("restriction to a line: splitting types") {
  auto R = P2R();
  auto Z = parse_poly<K>(R, "Z");
  auto X = parse_poly<K>(R, "X");
  {
    Module<K> M;
    M.F = FreeModule(R, {0, 0});
    SplittingType t = restrict_to_line(M, Z);
    CHECK(t.a == std::vector<long>{0, 0});
    CHECK(t.torsion == 0);
    CHECK(t.trivial());
  }
  {
    // charge-1 bubble restricted to Z = 0: (0,0), no torsion
    SplittingType t = restrict_to_line(instanton1(R), Z);
    CHECK(t.a == std::vector<long>{0, 0});
    CHECK(t.torsion == 0);
  }
  {
    // T_P2(-2) on any line: (0, -1)
    SplittingType t = restrict_to_line(tangent_m2(R), Z);
    CHECK(t.a == std::vector<long>{0, -1});
    CHECK(t.torsion == 0);
    SplittingType t2 = restrict_to_line(tangent_m2(R), parse_poly<K>(R, "X+2*Y-3*Z"));
    CHECK(t2.a == std::vector<long>{0, -1});
  }
  {
    // O + I_pt restricted to a line through the point: torsion 1
    Module<K> M = coker(R, {{"0"}, {"-Y"}, {"X"}}, {0, 1, 1});
    SplittingType through = restrict_to_line(M, X);  // X = 0 passes [0,0,1]
    CHECK(through.torsion == 1);
    SplittingType away = restrict_to_line(M, Z);  // Z = 0 misses the point
    CHECK(away.torsion == 0);
    CHECK(away.a == std::vector<long>{0, 0});
    // degrees: sum of type + torsion contribution matches c1 = 0 on the good line
    long sum = 0;
    for (long v : away.a) sum += v;
    CHECK(sum == 0);
  }
}

TEST_CASE("restriction sum rule and generic triviality over seeded lines") {
  auto R = P2R();
  testutil::Rng rng(404);
  std::vector<Module<K>> sheaves = {instanton1(R),
                                    coker(R, {{"X"}, {"Y^2"}, {"Y*Z^2"}}, {2, 1, 0})};
  for (const auto& M : sheaves) {
    ChernData c = chern(M);
    int generic_trivial = 0;
    for (int s = 0; s < 5; ++s) {
      Poly<K> line = Poly<K>::zero(R);
      for (int i = 0; i < 3; ++i)
        line = line + Poly<K>::variable(R, i).scale(K(rng.range(-9, 9)));
      if (line.is_zero()) line = parse_poly<K>(R, "Z");
      SplittingType t = restrict_to_line(M, line);
      long sum = t.torsion;
      for (long v : t.a) sum += v;
      CHECK(sum == c.c1);  // degree conservation including torsion length
      if (t.trivial()) ++generic_trivial;
    }
    // constant generic type (0,0) off the finite jumping set; small integer
    // coefficients can land on a jumping line, so ask only for a majority
    CHECK(generic_trivial >= 3);
  }
}

TEST_CASE("singular points and local charges") {
  auto R = P2R();
  {
    auto A = analyze_sheaf(instanton1(R));
    CHECK(singular_points(A, chern(instanton1(R))).empty());
  }
  {
    // bubble of (x, y^2+z^4, y z^2): singular exactly at [0,0,1], charge 1
    Module<K> M = coker(R, {{"X"}, {"Y^2"}, {"Y*Z^2"}}, {2, 1, 0});
    auto A = analyze_sheaf(M);
    auto pts = singular_points(A, chern(M));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].point == std::vector<std::string>{"0", "0", "1"});
    CHECK(pts[0].local_charge == 1);
    CHECK(pts[0].residue_degree == 1);
  }
  {
    // O + I_pt at [0,0,1]
    Module<K> M = coker(R, {{"0"}, {"-Y"}, {"X"}}, {0, 1, 1});
    auto A = analyze_sheaf(M);
    auto pts = singular_points(A, chern(M));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].point == std::vector<std::string>{"0", "0", "1"});
    CHECK(pts[0].local_charge == 1);
  }
}

TEST_CASE("singular point with an irrational residue field") {
  auto R = P2R();
  // O + I_W for W = {Y = 0, X^2 = 2 Z^2}: a conjugate pair of points, each of
  // local charge 1, weighted by residue degree 2 in the global charge count
  Module<K> M = coker(R, {{"0"}, {"X^2-2*Z^2"}, {"-Y"}}, {0, 1, 2});
  ChernData c = chern(M);
  CHECK(c.rank == 2);
  CHECK(c.c1 == 0);
  CHECK(c.c2 == 2);
  auto A = analyze_sheaf(M);
  auto pts = singular_points(A, c);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].residue_degree == 2);
  CHECK(pts[0].local_charge == 1);
  CHECK(pts[0].point.empty());  // no rational coordinates
  // the prime ideal comes back homogeneous in the ambient coordinates
  REQUIRE(!pts[0].prime_gens.empty());
  bool saw_quadric = false;
  for (const auto& g : pts[0].prime_gens) {
    CHECK(g.find("loc_") == std::string::npos);
    Poly<K> p = parse_poly<K>(R, g);
    CHECK(p.is_homogeneous());
    if (p.total_degree() == 2) saw_quadric = true;
  }
  CHECK(saw_quadric);
}

TEST_CASE("free summand section and quotient ideal") {
  auto R = P2R();
  {
    // O + I_pt: section onto the free factor, quotient the point ideal
    Module<K> M = coker(R, {{"0"}, {"-Y"}, {"X"}}, {0, 1, 1});
    auto A = analyze_sheaf(M);
    auto sec = free_summand_section(A, chern(M));
    REQUIRE(sec.has_value());
    CHECK(sec->ideal_colength == 1);
    GBasis<K> g = groebner_basis(R, [&] {
      std::vector<Vec<K>> v;
      ModOrder ord = top_order<K>(R);
      for (const auto& p : sec->ideal_gens) {
        Vec<K> w;
        for (const auto& [m, c] : p.terms()) w.t.push_back({m, 0, c});
        vec_sort(w, ord);
        v.push_back(w);
      }
      return v;
    }());
    CHECK(in_span([&] { Vec<K> w; Monomial m(3); m.e[0] = 1; w.t.push_back({m, 0, K(1)}); return w; }(), g));
    CHECK(in_span([&] { Vec<K> w; Monomial m(3); m.e[1] = 1; w.t.push_back({m, 0, K(1)}); return w; }(), g));
  }
  {
    // charge-1 bubble: h0 = 1, quotient of length 1
    Module<K> M = instanton1(R);
    auto A = analyze_sheaf(M);
    CHECK(h0(A, 0) == 1);
    auto sec = free_summand_section(A, chern(M));
    REQUIRE(sec.has_value());
    CHECK(sec->ideal_colength == 1);
  }
  {
    // stable 4x2 example from the (x,y)+(x,y) family: h0 = 0, no section
    Module<K> M = coker(R, {{"X", "Z"}, {"Y", "Z"}, {"Z", "X"}, {"0", "Y"}}, {1, 1, 1, 1});
    auto A = analyze_sheaf(M);
    CHECK(h0(A, 0) == 0);
    CHECK(!free_summand_section(A, chern(M)).has_value());
  }
}

TEST_CASE("sheaf equality: saturation-insensitive, twist-sensitive") {
  auto R = P2R();
  Module<K> a = structure_sheaf(R);
  Module<K> b = coker(R, {{"X"}, {"Y"}, {"Z"}}, {-1, 0, 0});  // non-minimal O presentation
  // b = coker(O(1)+O^2 <- O(... )) is not O; build instead O via redundant gens:
  Module<K> c;
  c.F = FreeModule(R, {0, 1});
  // second generator equals X * first: relation X e0 - e1... keep it graded: e1 = X e0
  {
    ModOrder ord = top_order<K>(R);
    Vec<K> v;
    Monomial mx(3);
    mx.e[0] = 1;
    v.t.push_back({mx, 0, K(1)});
    v.t.push_back({Monomial(3), 1, K(-1)});
    vec_sort(v, ord);
    c.rel.push_back(v);
  }
  auto Aa = analyze_sheaf(a), Ac = analyze_sheaf(c);
  CHECK(sheaf_equal(Aa, Ac));
  auto At = analyze_sheaf(structure_sheaf(R, 1));
  CHECK(!sheaf_equal(Aa, At));
  auto Ai = analyze_sheaf(instanton1(R));
  auto Ao = analyze_sheaf(coker(R, {{"0"}, {"-Y"}, {"X"}}, {0, 1, 1}));
  CHECK(!sheaf_equal(Ai, Ao));  // instanton vs O + I_pt: same chern, different h0... fitting
}
