#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ring.hpp"

namespace bubbletree {

// Multivariate polynomial: terms sorted descending by the ring's order, no
// zero coefficients stored. Immutable in spirit; all operations are pure.
template <class K>
class Poly {
 public:
  using Term = std::pair<Monomial, K>;

  Poly() = default;
  explicit Poly(RingPtr R) : R_(std::move(R)) {}

  static Poly zero(RingPtr R) { return Poly(std::move(R)); }
  static Poly constant(RingPtr R, const K& c) {
    Poly p(std::move(R));
    if (!c.is_zero()) p.t_.emplace_back(Monomial(p.R_->nvars()), c);
    return p;
  }
  static Poly variable(const RingPtr& R, int i, int power = 1) {
    Poly p(R);
    Monomial m(R->nvars());
    m.e[i] = power;
    p.t_.emplace_back(m, K(1));
    return p;
  }
  static Poly term(RingPtr R, Monomial m, const K& c) {
    Poly p(std::move(R));
    if (!c.is_zero()) p.t_.emplace_back(std::move(m), c);
    return p;
  }

  const RingPtr& ring() const { return R_; }
  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  size_t size() const { return t_.size(); }

  const Monomial& lead_monomial() const { return t_.front().first; }
  const K& lead_coeff() const { return t_.front().second; }

  int total_degree() const {
    int d = 0;
    for (const auto& t : t_) d = std::max(d, t.first.total_degree());
    return d;
  }

  bool is_homogeneous(long* weight_out = nullptr) const {
    if (t_.empty()) {
      if (weight_out) *weight_out = 0;
      return true;
    }
    long w = R_->weight_of(t_.front().first);
    for (const auto& t : t_)
      if (R_->weight_of(t.first) != w) return false;
    if (weight_out) *weight_out = w;
    return true;
  }
  long weight() const {
    long w = 0;
    if (!is_homogeneous(&w)) throw std::logic_error("poly: not homogeneous");
    return w;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    a.check(b);
    Poly r(a.R_ ? a.R_ : b.R_);
    size_t i = 0, j = 0;
    const auto& ord = r.R_->order;
    while (i < a.t_.size() || j < b.t_.size()) {
      if (j == b.t_.size() ||
          (i < a.t_.size() && ord.compare(a.t_[i].first, b.t_[j].first) > 0)) {
        r.t_.push_back(a.t_[i++]);
      } else if (i == a.t_.size() || ord.compare(a.t_[i].first, b.t_[j].first) < 0) {
        r.t_.push_back(b.t_[j++]);
      } else {
        K c = a.t_[i].second + b.t_[j].second;
        if (!c.is_zero()) r.t_.emplace_back(a.t_[i].first, c);
        ++i;
        ++j;
      }
    }
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  Poly operator-() const {
    Poly r = *this;
    for (auto& t : r.t_) t.second = -t.second;
    return r;
  }

  Poly mul_term(const Monomial& m, const K& c) const {
    Poly r(R_);
    if (c.is_zero()) return r;
    r.t_.reserve(t_.size());
    for (const auto& t : t_) r.t_.emplace_back(t.first * m, t.second * c);
    return r;
  }
  Poly scale(const K& c) const { return mul_term(Monomial(R_->nvars()), c); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check(b);
    Poly r(a.R_ ? a.R_ : b.R_);
    for (const auto& t : a.t_) r = r + b.mul_term(t.first, t.second);
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  // Homogeneous pieces sorted ascending by weight; they sum back to *this.
  std::vector<std::pair<long, Poly>> graded_parts() const {
    std::map<long, Poly> parts;
    for (const auto& t : t_) {
      long w = R_->weight_of(t.first);
      auto it = parts.find(w);
      if (it == parts.end()) it = parts.emplace(w, Poly(R_)).first;
      it->second.t_.push_back(t);
    }
    std::vector<std::pair<long, Poly>> out;
    for (auto& [w, p] : parts) {
      p.resort();
      out.emplace_back(w, std::move(p));
    }
    return out;
  }

  // Lowest-weight homogeneous part (the initial form at the origin).
  Poly initial_form() const {
    auto parts = graded_parts();
    return parts.empty() ? *this : parts.front().second;
  }
  long order_at_origin() const {
    if (t_.empty()) throw std::logic_error("poly: order of zero");
    long w = R_->weight_of(t_.front().first);
    for (const auto& t : t_) w = std::min(w, R_->weight_of(t.first));
    return w;
  }

  // Ring homomorphism given by images of every variable of this ring.
  Poly substitute(const RingPtr& target, const std::vector<Poly>& images) const {
    if (images.size() != R_->nvars()) throw std::invalid_argument("substitute: image count");
    Poly r = Poly::zero(target);
    for (const auto& t : t_) {
      Poly m = Poly::constant(target, t.second);
      for (size_t i = 0; i < R_->nvars(); ++i)
        for (int k = 0; k < t.first.e[i]; ++k) m = m * images[i];
      r = r + m;
    }
    return r;
  }

  // Exact division by d; throws if the division leaves a remainder.
  Poly divide_exact(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("poly: division by zero");
    Poly rem = *this, q(R_);
    const auto& ord = R_->order;
    (void)ord;
    while (!rem.is_zero()) {
      if (!d.lead_monomial().divides(rem.lead_monomial()))
        throw std::domain_error("poly: not divisible");
      Monomial m = rem.lead_monomial() / d.lead_monomial();
      K c = rem.lead_coeff() / d.lead_coeff();
      q = q + Poly::term(R_, m, c);
      rem = rem - d.mul_term(m, c);
    }
    return q;
  }

  std::string to_string() const {
    if (t_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < t_.size(); ++i) {
      const auto& [m, c] = t_[i];
      std::string cs = c.to_string();
      bool neg = !cs.empty() && cs[0] == '-';
      if (i == 0) {
        if (neg) s += "-";
      } else {
        s += neg ? " - " : " + ";
      }
      if (neg) cs = cs.substr(1);
      if (m.is_one()) {
        s += cs;
      } else {
        if (cs != "1") s += cs + "*";
        s += monomial_to_string(*R_, m);
      }
    }
    return s;
  }

  void resort() {
    std::sort(t_.begin(), t_.end(), [this](const Term& a, const Term& b) {
      return R_->order.compare(a.first, b.first) > 0;
    });
  }

 private:
  RingPtr R_;
  std::vector<Term> t_;

  void check(const Poly& b) const {
    if (R_ && b.R_ && !same_ring(R_, b.R_))
      throw std::invalid_argument("poly: ring mismatch");
  }
};

enum class PolyOp { add, sub, mul };

template <class K>
Poly<K> poly_arith(const Poly<K>& a, const Poly<K>& b, PolyOp op) {
  switch (op) {
    case PolyOp::add: return a + b;
    case PolyOp::sub: return a - b;
    case PolyOp::mul: return a * b;
  }
  throw std::logic_error("poly_arith: bad op");
}

}  // namespace bubbletree
