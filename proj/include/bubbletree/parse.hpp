#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

#include "polynomial.hpp"

namespace bubbletree {

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& msg, size_t at)
      : std::runtime_error(msg + " (at column " + std::to_string(at + 1) + ")"), pos(at) {}
};

// Recursive-descent parser for the shared polynomial syntax: integers,
// declared variables, + - * ^, parentheses; juxtaposition multiplies
// ("y z^2" and "y*z^2" are the same polynomial).
template <class K>
class PolyParser {
 public:
  PolyParser(RingPtr R, std::string text) : R_(std::move(R)), s_(std::move(text)) {}

  Poly<K> parse() {
    Poly<K> p = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
    return p;
  }

 private:
  RingPtr R_;
  std::string s_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Poly<K> expr() {
    bool neg = false;
    char c = peek();
    if (c == '+' || c == '-') {
      neg = c == '-';
      ++pos_;
    }
    Poly<K> p = product();
    if (neg) p = -p;
    while (true) {
      c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        Poly<K> q = product();
        p = c == '+' ? p + q : p - q;
      } else {
        break;
      }
    }
    return p;
  }

  Poly<K> product() {
    Poly<K> p = power();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        p = p * power();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
                 c == '(') {
        p = p * power();  // juxtaposition
      } else {
        break;
      }
    }
    return p;
  }

  Poly<K> power() {
    Poly<K> base = atom();
    if (peek() == '^') {
      ++pos_;
      long e = integer();
      if (e < 0) throw ParseError("negative exponent", pos_);
      Poly<K> r = Poly<K>::constant(R_, K(1));
      for (long i = 0; i < e; ++i) r = r * base;
      return r;
    }
    return base;
  }

  Poly<K> atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Poly<K> p = expr();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return Poly<K>::constant(R_, K::from_string(std::to_string(integer())));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      std::string name;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        name += s_[pos_++];
      int idx = R_->var_index(name);
      if (idx < 0) throw ParseError("undeclared variable '" + name + "'", start);
      return Poly<K>::variable(R_, idx);
    }
    throw ParseError("expected polynomial atom", pos_);
  }

  long integer() {
    skip_ws();
    size_t start = pos_;
    std::string digits;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      digits += s_[pos_++];
    if (digits.empty()) throw ParseError("expected integer", start);
    return std::stol(digits);
  }
};

template <class K>
Poly<K> parse_poly(const RingPtr& R, const std::string& text) {
  return PolyParser<K>(R, text).parse();
}

}  // namespace bubbletree
