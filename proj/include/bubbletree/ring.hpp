#pragma once

#include <algorithm>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bubbletree {

// Exponent vector over a fixed variable list.
struct Monomial {
  std::vector<int> e;

  Monomial() = default;
  explicit Monomial(size_t nvars) : e(nvars, 0) {}

  bool is_one() const {
    for (int x : e)
      if (x) return false;
    return true;
  }
  int total_degree() const { return std::accumulate(e.begin(), e.end(), 0); }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (size_t i = 0; i < r.e.size(); ++i) r.e[i] += b.e[i];
    return r;
  }
  bool divides(const Monomial& m) const {
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] > m.e[i]) return false;
    return true;
  }
  // requires divides()
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (size_t i = 0; i < r.e.size(); ++i) r.e[i] -= b.e[i];
    return r;
  }
  static Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (size_t i = 0; i < r.e.size(); ++i) r.e[i] = std::max(r.e[i], b.e[i]);
    return r;
  }
  static Monomial gcd(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (size_t i = 0; i < r.e.size(); ++i) r.e[i] = std::min(r.e[i], b.e[i]);
    return r;
  }
  bool coprime(const Monomial& b) const {
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] && b.e[i]) return false;
    return true;
  }

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }
};

enum class OrderKind { grevlex, lex, wdegrevlex };

// Monomial order on exponent vectors. Division and Buchberger always run over
// a genuine well-order (grevlex / lex); wdegrevlex refines by positive weights
// first and is only legal when every weight is positive.
struct MonomialOrder {
  OrderKind kind = OrderKind::grevlex;
  std::vector<int> priority;  // permutation of variable indices, most significant first
  std::vector<int> weights;   // consulted by wdegrevlex only

  // returns >0 if a > b, <0 if a < b, 0 if equal
  int compare(const Monomial& a, const Monomial& b) const {
    if (kind == OrderKind::wdegrevlex) {
      long wa = 0, wb = 0;
      for (size_t i = 0; i < a.e.size(); ++i) {
        wa += static_cast<long>(weights[i]) * a.e[i];
        wb += static_cast<long>(weights[i]) * b.e[i];
      }
      if (wa != wb) return wa < wb ? -1 : 1;
      return grevlex_tie(a, b);
    }
    if (kind == OrderKind::lex) {
      for (size_t k = 0; k < a.e.size(); ++k) {
        int i = var_at(k, a.e.size());
        if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? -1 : 1;
      }
      return 0;
    }
    int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db ? -1 : 1;
    return grevlex_tie(a, b);
  }
  bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }

 private:
  int var_at(size_t k, size_t n) const {
    return priority.empty() ? static_cast<int>(k) : priority[k % n];
  }
  int grevlex_tie(const Monomial& a, const Monomial& b) const {
    for (size_t k = a.e.size(); k-- > 0;) {
      int i = var_at(k, a.e.size());
      if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? 1 : -1;
    }
    return 0;
  }
};

// Polynomial ring descriptor: named variables with integer weights (the
// grading) and the active monomial order. Weights may be negative (the Cox
// variable T has weight -1); graded bookkeeping is enabled per ring.
struct RingDesc {
  std::vector<std::string> vars;
  std::vector<int> weights;
  MonomialOrder order;
  bool graded = true;

  size_t nvars() const { return vars.size(); }

  long weight_of(const Monomial& m) const {
    long w = 0;
    for (size_t i = 0; i < m.e.size(); ++i) w += static_cast<long>(weights[i]) * m.e[i];
    return w;
  }

  int var_index(const std::string& name) const {
    for (size_t i = 0; i < vars.size(); ++i)
      if (vars[i] == name) return static_cast<int>(i);
    return -1;
  }

  bool standard_graded() const {
    for (int w : weights)
      if (w != 1) return false;
    return graded;
  }

  friend bool operator==(const RingDesc& a, const RingDesc& b) {
    return a.vars == b.vars && a.weights == b.weights && a.graded == b.graded;
  }
};

using RingPtr = std::shared_ptr<const RingDesc>;

inline RingPtr make_ring(std::vector<std::string> vars, std::vector<int> weights,
                         bool graded = true) {
  auto r = std::make_shared<RingDesc>();
  r->vars = std::move(vars);
  if (weights.empty()) weights.assign(r->vars.size(), 1);
  if (weights.size() != r->vars.size())
    throw std::invalid_argument("ring: weight count mismatch");
  r->weights = std::move(weights);
  r->graded = graded;
  return r;
}

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
  return a == b || (a && b && *a == *b);
}

inline std::string monomial_to_string(const RingDesc& R, const Monomial& m) {
  std::string s;
  for (size_t i = 0; i < m.e.size(); ++i) {
    if (m.e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += R.vars[i];
    if (m.e[i] != 1) s += "^" + std::to_string(m.e[i]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace bubbletree
