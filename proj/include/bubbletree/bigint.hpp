#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace bubbletree {

// Arbitrary-precision signed integer, base 2^32 limbs, little endian.
// Only what exact rational arithmetic needs: ring ops, divmod, gcd, printing.
class BigInt {
 public:
  BigInt() : sign_(0) {}
  BigInt(long long v) {
    if (v == 0) {
      sign_ = 0;
      return;
    }
    unsigned long long a;
    if (v < 0) {
      sign_ = -1;
      a = ~static_cast<unsigned long long>(v) + 1ULL;
    } else {
      sign_ = 1;
      a = static_cast<unsigned long long>(v);
    }
    while (a) {
      d_.push_back(static_cast<uint32_t>(a & 0xffffffffULL));
      a >>= 32;
    }
  }

  static BigInt from_string(const std::string& s) {
    BigInt r;
    size_t i = 0;
    int sign = 1;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
      if (s[i] == '-') sign = -1;
      ++i;
    }
    if (i == s.size()) throw std::invalid_argument("BigInt: empty literal");
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
      r = r.mul_small(10);
      r = r + BigInt(s[i] - '0');
    }
    if (r.sign_ != 0) r.sign_ = sign;
    return r;
  }

  bool is_zero() const { return sign_ == 0; }
  int sign() const { return sign_; }
  bool is_one() const { return sign_ == 1 && d_.size() == 1 && d_[0] == 1; }

  BigInt operator-() const {
    BigInt r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    BigInt r;
    if (a.sign_ == b.sign_) {
      r.d_ = add_abs(a.d_, b.d_);
      r.sign_ = a.sign_;
    } else {
      int c = cmp_abs(a.d_, b.d_);
      if (c == 0) return BigInt();
      if (c > 0) {
        r.d_ = sub_abs(a.d_, b.d_);
        r.sign_ = a.sign_;
      } else {
        r.d_ = sub_abs(b.d_, a.d_);
        r.sign_ = b.sign_;
      }
    }
    return r;
  }
  friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

  friend BigInt operator*(const BigInt& a, const BigInt& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return BigInt();
    BigInt r;
    r.d_.assign(a.d_.size() + b.d_.size(), 0);
    for (size_t i = 0; i < a.d_.size(); ++i) {
      uint64_t carry = 0;
      for (size_t j = 0; j < b.d_.size(); ++j) {
        uint64_t cur = static_cast<uint64_t>(a.d_[i]) * b.d_[j] + r.d_[i + j] + carry;
        r.d_[i + j] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
      }
      size_t k = i + b.d_.size();
      while (carry) {
        uint64_t cur = r.d_[k] + carry;
        r.d_[k] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
        ++k;
      }
    }
    r.trim();
    r.sign_ = a.sign_ * b.sign_;
    return r;
  }

  // Truncated quotient (rounds toward zero), matching C semantics.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
    if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
    int c = cmp_abs(a.d_, b.d_);
    if (a.sign_ == 0 || c < 0) {
      q = BigInt();
      r = a;
      return;
    }
    if (b.d_.size() == 1) {
      uint32_t rem;
      q.d_ = divmod_small_abs(a.d_, b.d_[0], rem);
      q.trim();
      q.sign_ = q.d_.empty() ? 0 : a.sign_ * b.sign_;
      r = BigInt(static_cast<long long>(rem));
      if (r.sign_ != 0) r.sign_ = a.sign_;
      return;
    }
    divmod_knuth(a.d_, b.d_, q.d_, r.d_);
    q.trim();
    r.trim();
    q.sign_ = q.d_.empty() ? 0 : a.sign_ * b.sign_;
    r.sign_ = r.d_.empty() ? 0 : a.sign_;
  }

  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return q;
  }
  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return r;
  }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.sign_ == b.sign_ && a.d_ == b.d_;
  }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
  friend bool operator<(const BigInt& a, const BigInt& b) {
    if (a.sign_ != b.sign_) return a.sign_ < b.sign_;
    int c = cmp_abs(a.d_, b.d_);
    return a.sign_ >= 0 ? c < 0 : c > 0;
  }
  friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return !(b < a); }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return !(a < b); }

  static BigInt gcd(BigInt a, BigInt b) {
    a.sign_ = a.sign_ == 0 ? 0 : 1;
    b.sign_ = b.sign_ == 0 ? 0 : 1;
    while (!b.is_zero()) {
      BigInt q, r;
      divmod(a, b, q, r);
      a = b;
      b = r;
      if (!b.is_zero()) b.sign_ = 1;
    }
    return a;
  }

  BigInt abs() const {
    BigInt r = *this;
    if (r.sign_ < 0) r.sign_ = 1;
    return r;
  }

  // Fits in long long? (used for small-value fast paths and point coordinates)
  bool fits_ll() const {
    if (d_.size() > 2) return false;
    unsigned long long v = as_ull();
    if (sign_ >= 0) return v <= 0x7fffffffffffffffULL;
    return v <= 0x8000000000000000ULL;
  }
  long long to_ll() const {
    unsigned long long v = as_ull();
    return sign_ < 0 ? -static_cast<long long>(v) : static_cast<long long>(v);
  }

  std::string to_string() const {
    if (sign_ == 0) return "0";
    std::vector<uint32_t> tmp = d_;
    std::string digits;
    while (!tmp.empty()) {
      uint32_t rem;
      tmp = divmod_small_abs(tmp, 1000000000u, rem);
      while (!tmp.empty() && tmp.back() == 0) tmp.pop_back();
      char buf[16];
      if (tmp.empty())
        std::snprintf(buf, sizeof buf, "%u", rem);
      else
        std::snprintf(buf, sizeof buf, "%09u", rem);
      digits.insert(0, buf);
    }
    return (sign_ < 0 ? "-" : "") + digits;
  }

  size_t hash() const {
    size_t h = static_cast<size_t>(sign_) * 0x9e3779b97f4a7c15ULL;
    for (uint32_t limb : d_) h = h * 1099511628211ULL ^ limb;
    return h;
  }

 private:
  int sign_;
  std::vector<uint32_t> d_;

  unsigned long long as_ull() const {
    unsigned long long v = 0;
    if (d_.size() > 0) v = d_[0];
    if (d_.size() > 1) v |= static_cast<unsigned long long>(d_[1]) << 32;
    return v;
  }

  void trim() {
    while (!d_.empty() && d_.back() == 0) d_.pop_back();
    if (d_.empty()) sign_ = 0;
  }

  BigInt mul_small(uint32_t m) const {
    BigInt r;
    if (sign_ == 0 || m == 0) return r;
    uint64_t carry = 0;
    r.d_.reserve(d_.size() + 1);
    for (uint32_t limb : d_) {
      uint64_t cur = static_cast<uint64_t>(limb) * m + carry;
      r.d_.push_back(static_cast<uint32_t>(cur));
      carry = cur >> 32;
    }
    if (carry) r.d_.push_back(static_cast<uint32_t>(carry));
    r.sign_ = sign_;
    return r;
  }

  static int cmp_abs(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }

  static std::vector<uint32_t> add_abs(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      uint64_t cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r[i] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  // requires |a| >= |b|
  static std::vector<uint32_t> sub_abs(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r = a;
    int64_t borrow = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      int64_t cur = static_cast<int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
      if (cur < 0) {
        cur += (1LL << 32);
        borrow = 1;
      } else {
        borrow = 0;
      }
      r[i] = static_cast<uint32_t>(cur);
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
  }

  static std::vector<uint32_t> divmod_small_abs(const std::vector<uint32_t>& a, uint32_t b,
                                                uint32_t& rem) {
    std::vector<uint32_t> q(a.size(), 0);
    uint64_t cur = 0;
    for (size_t i = a.size(); i-- > 0;) {
      cur = (cur << 32) | a[i];
      q[i] = static_cast<uint32_t>(cur / b);
      cur %= b;
    }
    rem = static_cast<uint32_t>(cur);
    while (!q.empty() && q.back() == 0) q.pop_back();
    return q;
  }

  // Knuth algorithm D on normalized limbs; |u| >= |v|, v has >= 2 limbs.
  static void divmod_knuth(std::vector<uint32_t> u, std::vector<uint32_t> v,
                           std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
    int shift = 0;
    uint32_t top = v.back();
    while (!(top & 0x80000000u)) {
      top <<= 1;
      ++shift;
    }
    u = shl_bits(u, shift);
    v = shl_bits(v, shift);
    size_t n = v.size(), m = u.size() - n;
    u.push_back(0);
    q.assign(m + 1, 0);
    for (size_t j = m + 1; j-- > 0;) {
      uint64_t num = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
      uint64_t qhat = num / v[n - 1];
      uint64_t rhat = num % v[n - 1];
      while (qhat >= (1ULL << 32) ||
             qhat * v[n - 2] > ((rhat << 32) | u[j + n - 2])) {
        --qhat;
        rhat += v[n - 1];
        if (rhat >= (1ULL << 32)) break;
      }
      // multiply-subtract, may need one add-back
      int64_t borrow = 0;
      uint64_t carry = 0;
      for (size_t i = 0; i < n; ++i) {
        uint64_t p = qhat * v[i] + carry;
        carry = p >> 32;
        int64_t t = static_cast<int64_t>(u[i + j]) - static_cast<int64_t>(p & 0xffffffffULL) - borrow;
        if (t < 0) {
          t += (1LL << 32);
          borrow = 1;
        } else {
          borrow = 0;
        }
        u[i + j] = static_cast<uint32_t>(t);
      }
      int64_t t = static_cast<int64_t>(u[j + n]) - static_cast<int64_t>(carry) - borrow;
      if (t < 0) {
        t += (1LL << 32);
        u[j + n] = static_cast<uint32_t>(t);
        --qhat;
        uint64_t c2 = 0;
        for (size_t i = 0; i < n; ++i) {
          uint64_t s = static_cast<uint64_t>(u[i + j]) + v[i] + c2;
          u[i + j] = static_cast<uint32_t>(s);
          c2 = s >> 32;
        }
        u[j + n] = static_cast<uint32_t>(u[j + n] + c2);
      } else {
        u[j + n] = static_cast<uint32_t>(t);
      }
      q[j] = static_cast<uint32_t>(qhat);
    }
    u.resize(n);
    r = shr_bits(u, shift);
  }

  static std::vector<uint32_t> shl_bits(std::vector<uint32_t> a, int s) {
    if (s == 0) return a;
    uint32_t carry = 0;
    for (auto& limb : a) {
      uint32_t nc = limb >> (32 - s);
      limb = (limb << s) | carry;
      carry = nc;
    }
    if (carry) a.push_back(carry);
    return a;
  }
  static std::vector<uint32_t> shr_bits(std::vector<uint32_t> a, int s) {
    if (s == 0) return a;
    for (size_t i = 0; i < a.size(); ++i) {
      uint32_t hi = (i + 1 < a.size()) ? a[i + 1] : 0;
      a[i] = (a[i] >> s) | (hi << (32 - s));
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
  }
};

}  // namespace bubbletree
