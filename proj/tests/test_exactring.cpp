#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bubbletree/bigint.hpp"
#include "bubbletree/gfp.hpp"
#include "bubbletree/parse.hpp"
#include "bubbletree/polynomial.hpp"
#include "bubbletree/rational.hpp"
#include "testutil.hpp"

using namespace bubbletree;
using testutil::Rng;

TEST_CASE("bigint agrees with native arithmetic on random values") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    long long a = static_cast<long long>(rng.range(-1000000000L, 1000000000L));
    long long b = static_cast<long long>(rng.range(-1000000000L, 1000000000L));
    BigInt A(a), B(b);
    CHECK((A + B).to_string() == std::to_string(a + b));
    CHECK((A - B).to_string() == std::to_string(a - b));
    CHECK((A * B).to_string() == std::to_string(a * b));
    if (b != 0) {
      CHECK((A / B).to_string() == std::to_string(a / b));
      CHECK((A % B).to_string() == std::to_string(a % b));
    }
  }
}

TEST_CASE("bigint multi-limb division identities") {
  Rng rng(19);
  for (int i = 0; i < 300; ++i) {
    BigInt a(1), b(1);
    int la = static_cast<int>(rng.range(1, 5)), lb = static_cast<int>(rng.range(1, 3));
    for (int k = 0; k < la; ++k) a = a * BigInt(static_cast<long long>(rng.next() >> 1)) + BigInt(static_cast<long long>(rng.range(0, 1000)));
    for (int k = 0; k < lb; ++k) b = b * BigInt(static_cast<long long>(rng.next() >> 1)) + BigInt(static_cast<long long>(rng.range(1, 1000)));
    if (rng.range(0, 1)) a = -a;
    if (rng.range(0, 1)) b = -b;
    if (b.is_zero()) continue;
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK(q * b + r == a);
    CHECK(r.abs() < b.abs());
  }
  CHECK(BigInt::from_string("123456789012345678901234567890").to_string() ==
        "123456789012345678901234567890");
  CHECK(BigInt::gcd(BigInt::from_string("123456789012345678901234567890"),
                    BigInt::from_string("9876543210"))
            .to_string() == "90");
}

template <class K>
static void check_field_axioms(K a, K b, K c) {
  CHECK(a + b == b + a);
  CHECK((a + b) + c == a + (b + c));
  CHECK(a * b == b * a);
  CHECK((a * b) * c == a * (b * c));
  CHECK(a * (b + c) == a * b + a * c);
  CHECK(a + K(0) == a);
  CHECK(a * K(1) == a);
  CHECK(a - a == K(0));
  if (!a.is_zero()) CHECK(a / a == K(1));
}

TEST_CASE("rational field axioms hold exactly on random samples") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    auto r = [&] {
      BigInt n(static_cast<long long>(rng.range(-100000, 100000)));
      BigInt d(static_cast<long long>(rng.range(1, 100000)));
      return Rational(n, d);
    };
    check_field_axioms(r(), r(), r());
  }
  // canonical form: reduced, positive denominator
  Rational q(BigInt(-6), BigInt(-8));
  CHECK(q.num().to_string() == "3");
  CHECK(q.den().to_string() == "4");
  CHECK(Rational::from_string("-10/4").to_string() == "-5/2");
}

TEST_CASE("prime field axioms and canonical representatives") {
  CHECK(GFp::modulus() == 65521);
  Rng rng(13);
  for (int i = 0; i < 500; ++i) {
    GFp a(rng.range(-1000000, 1000000));
    GFp b(rng.range(-1000000, 1000000));
    GFp c(rng.range(-1000000, 1000000));
    check_field_axioms(a, b, c);
    CHECK(a.value() < GFp::modulus());
  }
}

static RingPtr xyz() { return make_ring({"x", "y", "z"}, {1, 1, 1}); }

TEST_CASE("monomial order properties: antisymmetry, transitivity, multiplicativity") {
  for (OrderKind kind : {OrderKind::grevlex, OrderKind::lex}) {
    auto R = std::make_shared<RingDesc>();
    R->vars = {"x", "y", "z"};
    R->weights = {1, 1, 1};
    R->order.kind = kind;
    RingPtr rp = R;
    Rng rng(17 + static_cast<int>(kind));
    MonomialOrder& ord = R->order;
    for (int i = 0; i < 2000; ++i) {
      Monomial a = testutil::random_monomial(rp, rng, 5);
      Monomial b = testutil::random_monomial(rp, rng, 5);
      Monomial c = testutil::random_monomial(rp, rng, 5);
      int ab = ord.compare(a, b);
      CHECK(ab == -ord.compare(b, a));
      CHECK((ab == 0) == (a == b));
      if (ord.compare(a, b) > 0 && ord.compare(b, c) > 0) CHECK(ord.compare(a, c) > 0);
      // multiplicative: u < v implies uw < vw
      if (ab < 0) CHECK(ord.compare(a * c, b * c) < 0);
      // 1 is minimal
      Monomial one(3);
      if (!(a == one)) CHECK(ord.compare(a, one) > 0);
    }
  }
}

TEST_CASE("lex and priority-permuted orders") {
  auto R = std::make_shared<RingDesc>();
  R->vars = {"x", "y"};
  R->weights = {1, 1};
  R->order.kind = OrderKind::lex;
  RingPtr rp = R;
  // under lex x > y, x beats any power of y
  Monomial mx(2), my2(2);
  mx.e[0] = 1;
  my2.e[1] = 5;
  CHECK(R->order.compare(mx, my2) > 0);
  // with priority (y, x) the comparison flips
  auto S = std::make_shared<RingDesc>();
  S->vars = {"x", "y"};
  S->weights = {1, 1};
  S->order.kind = OrderKind::lex;
  S->order.priority = {1, 0};
  CHECK(S->order.compare(mx, my2) < 0);
  // weight-refined grevlex with non-uniform positive weights
  auto W = std::make_shared<RingDesc>();
  W->vars = {"x", "y"};
  W->weights = {1, 3};
  W->order.kind = OrderKind::wdegrevlex;
  W->order.weights = {1, 3};
  Monomial mx2(2), my(2);
  mx2.e[0] = 2;
  my.e[1] = 1;
  CHECK(W->order.compare(mx2, my) < 0);  // weight 2 < 3
}

TEST_CASE("poly arithmetic examples") {
  auto R = xyz();
  auto P = [&](const std::string& s) { return parse_poly<Rational>(R, s); };
  CHECK(poly_arith(P("x+y"), P("x-y"), PolyOp::mul) == P("x^2-y^2"));
  CHECK(poly_arith(P("y^2+z^4"), P("y^2"), PolyOp::sub) == P("z^4"));
  CHECK(poly_arith(P("0"), P("x^3"), PolyOp::mul).is_zero());
  CHECK_THROWS(poly_arith(P("x"), parse_poly<Rational>(make_ring({"u"}, {1}), "u"), PolyOp::add));
}

TEST_CASE("graded parts split and recompose") {
  auto R = xyz();
  auto P = [&](const std::string& s) { return parse_poly<Rational>(R, s); };
  auto parts = P("y^2+z^4").graded_parts();
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].first == 2);
  CHECK(parts[0].second == P("y^2"));
  CHECK(parts[1].first == 4);
  CHECK(parts[1].second == P("z^4"));

  auto px = P("x").graded_parts();
  REQUIRE(px.size() == 1);
  CHECK(px[0].first == 1);

  CHECK(P("0").graded_parts().empty());

  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    Poly<Rational> p = testutil::random_poly<Rational>(R, rng, 6, 4, 9);
    Poly<Rational> sum = Poly<Rational>::zero(R);
    long prev = -1000000;
    for (auto& [w, part] : p.graded_parts()) {
      CHECK(part.is_homogeneous());
      CHECK(w > prev);
      prev = w;
      sum = sum + part;
    }
    CHECK(sum == p);
  }
}

TEST_CASE("substitution is an exact ring homomorphism") {
  auto R = xyz();
  auto cox = make_ring({"X", "Y", "Z", "T"}, {1, 1, 1, -1});
  auto P = [&](const std::string& s) { return parse_poly<Rational>(R, s); };
  auto C = [&](const std::string& s) { return parse_poly<Rational>(cox, s); };
  std::vector<Poly<Rational>> blowdown = {C("X T"), C("Y T"), C("Z T")};

  CHECK(P("x^2+z").substitute(cox, blowdown) == C("X^2 T^2 + Z T"));
  CHECK(P("y^2+z^4").substitute(cox, blowdown) == C("Y^2 T^2 + Z^4 T^4"));

  std::vector<Poly<Rational>> id = {Poly<Rational>::variable(R, 0), Poly<Rational>::variable(R, 1),
                                    Poly<Rational>::variable(R, 2)};
  Rng rng(29);
  for (int i = 0; i < 100; ++i) {
    Poly<Rational> p = testutil::random_poly<Rational>(R, rng, 5, 3, 7);
    CHECK(p.substitute(R, id) == p);
    Poly<Rational> q = testutil::random_poly<Rational>(R, rng, 5, 3, 7);
    CHECK((p * q).substitute(cox, blowdown) ==
          p.substitute(cox, blowdown) * q.substitute(cox, blowdown));
    CHECK((p + q).substitute(cox, blowdown) ==
          p.substitute(cox, blowdown) + q.substitute(cox, blowdown));
  }
}

TEST_CASE("parser accepts juxtaposition and reports errors with location") {
  auto R = xyz();
  auto P = [&](const std::string& s) { return parse_poly<Rational>(R, s); };
  CHECK(P("y*z^2") == P("y z^2"));
  CHECK(P("2x") == P("2*x"));
  CHECK(P("x(y+z)") == P("x*y+x*z"));
  CHECK(P("-x^2") == -P("x^2"));
  CHECK(P("(x+y)^2") == P("x^2+2*x*y+y^2"));
  CHECK_THROWS_AS(P("x+w"), ParseError);
  CHECK_THROWS_AS(P("x++"), ParseError);
  CHECK_THROWS_AS(P("(x"), ParseError);
}

TEST_CASE("printing is canonical and parse(print(p)) == p") {
  auto R = xyz();
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    Poly<Rational> p = testutil::random_poly<Rational>(R, rng, 8, 4, 12);
    CHECK(parse_poly<Rational>(R, p.to_string()) == p);
  }
  CHECK(parse_poly<Rational>(R, "y^2+z^4").to_string() == "z^4 + y^2");
  CHECK(parse_poly<Rational>(R, "x^2-3*x*y").to_string() == "x^2 - 3*x*y");
}

TEST_CASE("homogeneity flag verified") {
  auto R = xyz();
  auto P = [&](const std::string& s) { return parse_poly<Rational>(R, s); };
  CHECK(P("x^2+x*y").is_homogeneous());
  CHECK(!P("x^2+x").is_homogeneous());
  long w = 0;
  CHECK(P("x^2 y + z^3").is_homogeneous(&w));
  CHECK(w == 3);
}

TEST_CASE("negative weights: Cox variable T") {
  auto cox = make_ring({"X", "Y", "Z", "T"}, {1, 1, 1, -1});
  auto C = [&](const std::string& s) { return parse_poly<Rational>(cox, s); };
  CHECK(C("X T").weight() == 0);
  CHECK(C("T^3").weight() == -3);
  CHECK(C("X^2 T").weight() == 1);
  // division order ignores weights: T reduces like an ordinary variable
  CHECK(cox->order.compare(C("T^2").lead_monomial(), C("T").lead_monomial()) > 0);
}
