#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bubbletree {

// Prime field F_p with a process-wide runtime modulus, set once at startup
// before any element is created. Representatives live in [0, p).
class GFp {
 public:
  GFp() : v_(0) {}
  GFp(long long n) {
    long long m = n % static_cast<long long>(modulus());
    if (m < 0) m += modulus();
    v_ = static_cast<uint64_t>(m);
  }

  static void set_modulus(uint64_t p) {
    if (p <= (1u << 15) || !is_prime(p))
      throw std::invalid_argument("GFp: modulus must be a prime > 2^15");
    modulus_ref() = p;
  }
  static uint64_t modulus() { return modulus_ref(); }

  static GFp from_string(const std::string& s) {
    size_t i = 0;
    int sign = 1;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
      if (s[i] == '-') sign = -1;
      ++i;
    }
    GFp r(0);
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("GFp: bad digit");
      r = r * GFp(10) + GFp(s[i] - '0');
    }
    return sign < 0 ? -r : r;
  }

  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }
  uint64_t value() const { return v_; }
  int sign() const { return v_ == 0 ? 0 : 1; }

  friend GFp operator+(GFp a, GFp b) { return raw((a.v_ + b.v_) % modulus()); }
  friend GFp operator-(GFp a, GFp b) { return raw((a.v_ + modulus() - b.v_) % modulus()); }
  friend GFp operator*(GFp a, GFp b) {
    return raw(static_cast<uint64_t>((static_cast<__uint128_t>(a.v_) * b.v_) % modulus()));
  }
  friend GFp operator/(GFp a, GFp b) { return a * b.inv(); }
  GFp operator-() const { return v_ == 0 ? *this : raw(modulus() - v_); }

  GFp inv() const {
    if (v_ == 0) throw std::domain_error("GFp: division by zero");
    long long t = 0, nt = 1;
    long long r = static_cast<long long>(modulus()), nr = static_cast<long long>(v_);
    while (nr != 0) {
      long long q = r / nr;
      long long tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (t < 0) t += static_cast<long long>(modulus());
    return raw(static_cast<uint64_t>(t));
  }

  friend bool operator==(GFp a, GFp b) { return a.v_ == b.v_; }
  friend bool operator!=(GFp a, GFp b) { return a.v_ != b.v_; }

  std::string to_string() const { return std::to_string(v_); }
  size_t hash() const { return static_cast<size_t>(v_) * 0x9e3779b97f4a7c15ULL; }

  static const char* field_name() { return "Fp"; }

 private:
  uint64_t v_;

  static GFp raw(uint64_t v) {
    GFp r;
    r.v_ = v;
    return r;
  }
  static uint64_t& modulus_ref() {
    static uint64_t p = 65521;
    return p;
  }
  static bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL}) {
      if (n % d == 0) return n == d;
    }
    // deterministic Miller-Rabin for 64-bit range
    auto mulmod = [&](uint64_t a, uint64_t b) {
      return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % n);
    };
    auto powmod = [&](uint64_t a, uint64_t e) {
      uint64_t r = 1;
      a %= n;
      while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
      }
      return r;
    };
    uint64_t d = n - 1;
    int s = 0;
    while (!(d & 1)) {
      d >>= 1;
      ++s;
    }
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
      uint64_t x = powmod(a, d);
      if (x == 1 || x == n - 1) continue;
      bool composite = true;
      for (int i = 1; i < s; ++i) {
        x = mulmod(x, x);
        if (x == n - 1) {
          composite = false;
          break;
        }
      }
      if (composite) return false;
    }
    return true;
  }
};

}  // namespace bubbletree
