#pragma once

// Zero-dimensional point decomposition over QQ: squarefree eliminants,
// Kronecker factorization for univariate polynomials, and splitting of a
// radical zero-dimensional ideal into primes via minimal polynomials of
// separating linear forms. Desk scale by design.

#include <optional>
#include <vector>

#include "modops.hpp"
#include "rational.hpp"

namespace bubbletree {

using UniPoly = std::vector<Rational>;  // coefficients, low degree first

inline int uni_degree(const UniPoly& p) {
  for (size_t i = p.size(); i-- > 0;)
    if (!p[i].is_zero()) return static_cast<int>(i);
  return -1;
}
inline void uni_trim(UniPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}
inline UniPoly uni_mul(const UniPoly& a, const UniPoly& b) {
  if (a.empty() || b.empty()) return {};
  UniPoly r(a.size() + b.size() - 1, Rational(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  uni_trim(r);
  return r;
}
inline UniPoly uni_sub(UniPoly a, const UniPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] - b[i];
  uni_trim(a);
  return a;
}
inline UniPoly uni_add(UniPoly a, const UniPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Rational(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] = a[i] + b[i];
  uni_trim(a);
  return a;
}

// division with remainder; returns quotient, rem in place
inline UniPoly uni_divmod(UniPoly& rem, const UniPoly& d) {
  UniPoly q(rem.size(), Rational(0));
  int dd = uni_degree(d);
  if (dd < 0) throw std::domain_error("unipoly: division by zero");
  while (uni_degree(rem) >= dd) {
    int k = uni_degree(rem) - dd;
    Rational c = rem[uni_degree(rem)] / d[dd];
    q[k] = q[k] + c;
    UniPoly shift(k + dd + 1, Rational(0));
    for (int i = 0; i <= dd; ++i) shift[i + k] = d[i] * c;
    rem = uni_sub(rem, shift);
  }
  uni_trim(q);
  return q;
}

inline UniPoly uni_gcd(UniPoly a, UniPoly b) {
  uni_trim(a);
  uni_trim(b);
  while (uni_degree(b) >= 0) {
    UniPoly r = a;
    uni_divmod(r, b);
    a = b;
    b = r;
  }
  if (uni_degree(a) >= 0) {
    Rational lead = a[uni_degree(a)];
    for (auto& c : a) c = c / lead;
  }
  return a;
}

inline UniPoly uni_derivative(const UniPoly& p) {
  UniPoly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long long>(i)));
  uni_trim(d);
  return d;
}

inline UniPoly uni_squarefree(const UniPoly& p) {
  UniPoly g = uni_gcd(p, uni_derivative(p));
  if (uni_degree(g) <= 0) return p;
  UniPoly r = p;
  return uni_divmod(r, g);
}

// scale to primitive integer coefficients, positive lead
inline std::vector<BigInt> uni_to_int(const UniPoly& p) {
  BigInt den(1);
  for (const auto& c : p) den = den * (c.den() / BigInt::gcd(den, c.den()));
  std::vector<BigInt> out;
  BigInt content(0);
  for (const auto& c : p) {
    BigInt v = c.num() * (den / c.den());
    out.push_back(v);
    content = BigInt::gcd(content, v);
  }
  if (!content.is_zero()) {
    if (out.back().sign() < 0) content = -content;
    for (auto& v : out) v = v / content;
  }
  return out;
}

inline Rational uni_eval(const UniPoly& p, const Rational& x) {
  Rational r(0);
  for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

inline std::vector<BigInt> divisors_of(const BigInt& n) {
  std::vector<BigInt> out;
  BigInt a = n.abs();
  if (a.is_zero()) return out;
  for (BigInt d(1); !(a < d * d); d = d + BigInt(1)) {
    if ((a % d).is_zero()) {
      out.push_back(d);
      BigInt other = a / d;
      if (other != d) out.push_back(other);
    }
  }
  return out;
}

// Complete factorization into monic irreducible factors over QQ (with
// multiplicity collapsed away: intended for squarefree inputs). Rational
// roots first, then Kronecker interpolation for higher-degree factors.
inline std::vector<UniPoly> uni_factor_squarefree(UniPoly f) {
  std::vector<UniPoly> factors;
  uni_trim(f);
  if (uni_degree(f) <= 0) return factors;

  // strip rational roots
  bool found = true;
  while (uni_degree(f) >= 1 && found) {
    found = false;
    if (f[0].is_zero()) {
      factors.push_back({Rational(0), Rational(1)});
      f.erase(f.begin());
      uni_trim(f);
      found = true;
      continue;
    }
    auto ip = uni_to_int(f);
    for (const BigInt& p : divisors_of(ip.front())) {
      for (const BigInt& q : divisors_of(ip.back())) {
        for (int s : {1, -1}) {
          Rational root(s < 0 ? -p : p, q);
          if (uni_eval(f, root).is_zero()) {
            UniPoly lin{-root, Rational(1)};
            f = uni_divmod(f, lin);  // deflate: keep the quotient
            factors.push_back(lin);
            found = true;
            goto next_round;
          }
        }
      }
    }
  next_round:;
  }
  int n = uni_degree(f);
  if (n <= 0) return factors;
  if (n <= 2) {  // no rational roots left: irreducible
    Rational lead = f[n];
    for (auto& c : f) c = c / lead;
    factors.push_back(f);
    return factors;
  }

  // Kronecker: try factor degrees k = 2 .. n/2
  for (int k = 2; k <= n / 2; ++k) {
    std::vector<Rational> nodes;
    for (long t = 0; static_cast<int>(nodes.size()) <= k; ++t) {
      nodes.emplace_back(t);
      if (t > 0 && static_cast<int>(nodes.size()) <= k) nodes.emplace_back(-t);
    }
    nodes.resize(k + 1);
    std::vector<std::vector<BigInt>> choices;
    bool feasible = true;
    for (const auto& x : nodes) {
      Rational v = uni_eval(f, x);
      if (!v.is_integer()) throw std::logic_error("kronecker: non-integer value");
      auto divs = divisors_of(v.num());
      if (divs.empty()) {
        feasible = false;
        break;
      }
      std::vector<BigInt> with_sign;
      for (const auto& d : divs) {
        with_sign.push_back(d);
        with_sign.push_back(-d);
      }
      choices.push_back(with_sign);
    }
    if (!feasible) continue;
    std::vector<size_t> idx(k + 1, 0);
    while (true) {
      // Lagrange interpolation through (nodes[i], choices[i][idx[i]])
      UniPoly cand;
      for (int i = 0; i <= k; ++i) {
        UniPoly li{Rational(1)};
        Rational denom(1);
        for (int j = 0; j <= k; ++j) {
          if (j == i) continue;
          li = uni_mul(li, UniPoly{-nodes[j], Rational(1)});
          denom = denom * (nodes[i] - nodes[j]);
        }
        Rational ci = Rational(choices[i][idx[i]]) / denom;
        UniPoly scaled = li;
        for (auto& c : scaled) c = c * ci;
        cand = uni_add(cand, scaled);
      }
      if (uni_degree(cand) == k) {
        UniPoly rem = f;
        UniPoly q = uni_divmod(rem, cand);
        if (uni_degree(rem) < 0) {
          auto left = uni_factor_squarefree(cand);
          auto right = uni_factor_squarefree(q);
          factors.insert(factors.end(), left.begin(), left.end());
          factors.insert(factors.end(), right.begin(), right.end());
          return factors;
        }
      }
      // advance odometer
      int pos = 0;
      while (pos <= k) {
        if (++idx[pos] < choices[pos].size()) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos > k) break;
    }
  }
  // irreducible
  Rational lead = f[n];
  for (auto& c : f) c = c / lead;
  factors.push_back(f);
  return factors;
}

// ---------------------------------------------------------------------------
// zero-dimensional ideals in a 2-variable chart ring

struct PointComponent {
  std::vector<std::string> prime_gens;  // generators of the prime ideal (chart coords)
  int residue_degree = 1;
  std::optional<std::pair<Rational, Rational>> rational_point;  // (u, v) when residue degree 1
};

namespace detail_points {

using K = Rational;

inline Poly<K> uni_to_poly(const RingPtr& R, const UniPoly& p, int var) {
  Poly<K> out = Poly<K>::zero(R);
  for (size_t i = 0; i < p.size(); ++i) {
    Monomial m(R->nvars());
    m.e[var] = static_cast<int>(i);
    out = out + Poly<K>::term(R, m, p[i]);
  }
  return out;
}

// minimal polynomial of the multiplication-by-f operator on R/J
inline UniPoly operator_minpoly(const Module<K>& M, const GBasis<K>& gb,
                                const std::vector<std::pair<Monomial, int>>& basis,
                                const Poly<K>& f) {
  size_t D = basis.size();
  std::map<std::pair<std::vector<int>, int>, size_t> index;
  for (size_t i = 0; i < D; ++i) index[{basis[i].first.e, basis[i].second}] = i;
  // operator matrix
  std::vector<std::vector<K>> Mat(D, std::vector<K>(D, K(0)));
  ModOrder ord = top_order<K>(M.F.R);
  for (size_t k = 0; k < D; ++k) {
    Vec<K> v;
    v.t.push_back({basis[k].first, basis[k].second, K(1)});
    Vec<K> fv = vec_mul_poly(v, f, ord);
    Vec<K> nf = normal_form(fv, gb);
    for (const auto& t : nf.t) Mat[index.at({t.m.e, t.pos})][k] = t.c;
  }
  // grow Krylov-style: find minimal dependency among I, M, M^2, ...
  std::vector<std::vector<K>> powers;  // flattened matrices
  auto flatten = [&](const std::vector<std::vector<K>>& A) {
    std::vector<K> out;
    for (const auto& row : A) out.insert(out.end(), row.begin(), row.end());
    return out;
  };
  std::vector<std::vector<K>> P(D, std::vector<K>(D, K(0)));
  for (size_t i = 0; i < D; ++i) P[i][i] = K(1);
  std::vector<std::vector<K>> rows;  // echelon of flattened powers
  std::vector<std::vector<K>> raw;
  for (size_t step = 0; step <= D; ++step) {
    raw.push_back(flatten(P));
    // solve for dependency: is last row in span of previous?
    std::vector<std::vector<K>> mat = raw;
    // gaussian elimination with coefficient tracking
    size_t n = mat.size(), w = mat[0].size();
    std::vector<std::vector<K>> coef(n, std::vector<K>(n, K(0)));
    for (size_t i = 0; i < n; ++i) coef[i][i] = K(1);
    size_t r = 0;
    for (size_t c = 0; c < w && r < n - 1; ++c) {
      size_t piv = r;
      while (piv < n - 1 && mat[piv][c].is_zero()) ++piv;
      if (piv == n - 1) continue;
      std::swap(mat[piv], mat[r]);
      std::swap(coef[piv], coef[r]);
      for (size_t rr = 0; rr < n; ++rr) {
        if (rr == r || mat[rr][c].is_zero()) continue;
        K fac = mat[rr][c] / mat[r][c];
        for (size_t cc = 0; cc < w; ++cc) mat[rr][cc] = mat[rr][cc] - fac * mat[r][cc];
        for (size_t cc = 0; cc < n; ++cc) coef[rr][cc] = coef[rr][cc] - fac * coef[r][cc];
      }
      ++r;
    }
    bool zero = true;
    for (const auto& c : mat.back())
      if (!c.is_zero()) zero = false;
    if (zero) {
      UniPoly mp(coef.back().begin(), coef.back().begin() + step + 1);
      Rational lead = mp[uni_degree(mp)];
      for (auto& c : mp) c = c / lead;
      return mp;
    }
    // P = P * Mat
    std::vector<std::vector<K>> Q(D, std::vector<K>(D, K(0)));
    for (size_t i = 0; i < D; ++i)
      for (size_t k = 0; k < D; ++k) {
        if (P[i][k].is_zero()) continue;
        for (size_t j = 0; j < D; ++j)
          if (!Mat[k][j].is_zero()) Q[i][j] = Q[i][j] + P[i][k] * Mat[k][j];
      }
    P = std::move(Q);
  }
  throw std::logic_error("operator_minpoly: no dependency found");
}

}  // namespace detail_points

// Decompose a zero-dimensional ideal over QQ[u,v] into prime components.
inline std::vector<PointComponent> decompose_zero_dim(const RingPtr& R,
                                                      const std::vector<Poly<Rational>>& gens) {
  using K = Rational;
  using detail_points::uni_to_poly;
  if (R->nvars() != 2) throw std::invalid_argument("decompose_zero_dim: need 2 variables");

  auto make_module = [&](const std::vector<Poly<K>>& g) {
    Module<K> M;
    M.F = FreeModule::trivial(R, 1);
    ModOrder ord = top_order<K>(R);
    for (const auto& p : g) {
      if (p.is_zero()) continue;
      Vec<K> v;
      for (const auto& [m, c] : p.terms()) v.t.push_back({m, 0, c});
      vec_sort(v, ord);
      M.rel.push_back(v);
    }
    return M;
  };

  // radicalize via squarefree eliminants (Seidenberg, zero-dimensional case)
  Module<K> M0 = make_module(gens);
  GBasis<K> gb0 = module_gb(M0);
  auto basis0 = standard_pairs(M0, gb0);
  std::vector<Poly<K>> rad = gens;
  for (int var = 0; var < 2; ++var) {
    UniPoly mp =
        detail_points::operator_minpoly(M0, gb0, basis0, Poly<K>::variable(R, var));
    rad.push_back(uni_to_poly(R, uni_squarefree(mp), var));
  }

  std::vector<PointComponent> out;
  std::function<void(std::vector<Poly<K>>)> split = [&](std::vector<Poly<K>> J) {
    Module<K> M = make_module(J);
    GBasis<K> gb = module_gb(M);
    auto basis = standard_pairs(M, gb);
    size_t D = basis.size();
    if (D == 0) return;  // unit ideal component
    for (long lambda = 0;; ++lambda) {
      Poly<K> ell = Poly<K>::variable(R, 0) +
                    Poly<K>::variable(R, 1).scale(K(lambda));
      UniPoly mp = detail_points::operator_minpoly(M, gb, basis, ell);
      auto factors = uni_factor_squarefree(mp);
      if (factors.size() == 1 && uni_degree(mp) == static_cast<int>(D)) {
        PointComponent pc;
        pc.residue_degree = static_cast<int>(D);
        GBasis<K> pgb = gb;
        for (const auto& g : pgb.g) {
          PolyMatrix<K> col = columns_to_matrix(R, 1, std::vector<Vec<K>>{g});
          pc.prime_gens.push_back(col.at(0, 0).to_string());
        }
        if (D == 1) {
          // read off the point: NF of u and v are constants
          Vec<K> u = normal_form(
              [&] {
                Vec<K> w;
                Monomial m(2);
                m.e[0] = 1;
                w.t.push_back({m, 0, K(1)});
                return w;
              }(),
              gb);
          Vec<K> v = normal_form(
              [&] {
                Vec<K> w;
                Monomial m(2);
                m.e[1] = 1;
                w.t.push_back({m, 0, K(1)});
                return w;
              }(),
              gb);
          Rational uc = u.is_zero() ? Rational(0) : u.t.front().c;
          Rational vc = v.is_zero() ? Rational(0) : v.t.front().c;
          pc.rational_point = {uc, vc};
        }
        out.push_back(std::move(pc));
        return;
      }
      if (factors.size() == 1) continue;  // not separating, next lambda
      for (const auto& q : factors) {
        std::vector<Poly<K>> Ji = J;
        // q(ell)
        Poly<K> qe = Poly<K>::zero(R);
        Poly<K> pw = Poly<K>::constant(R, K(1));
        for (size_t i = 0; i < q.size(); ++i) {
          qe = qe + pw.scale(q[i]);
          pw = pw * ell;
        }
        Ji.push_back(qe);
        split(std::move(Ji));
      }
      return;
    }
  };
  split(rad);

  // deterministic order: sort by residue degree then printed gens
  std::sort(out.begin(), out.end(), [](const PointComponent& a, const PointComponent& b) {
    if (a.residue_degree != b.residue_degree) return a.residue_degree < b.residue_degree;
    return a.prime_gens < b.prime_gens;
  });
  return out;
}

}  // namespace bubbletree
