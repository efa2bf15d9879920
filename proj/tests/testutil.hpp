#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bubbletree/polynomial.hpp"

namespace testutil {

// Deterministic PRNG for property tests (splitmix64).
struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s += 0x9e3779b97f4a7c15ULL;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  long range(long lo, long hi) {  // inclusive
    return lo + static_cast<long>(next() % static_cast<uint64_t>(hi - lo + 1));
  }
};

template <class K>
bubbletree::Poly<K> random_poly(const bubbletree::RingPtr& R, Rng& rng, int max_terms,
                                int max_deg, long max_coeff) {
  using namespace bubbletree;
  Poly<K> p = Poly<K>::zero(R);
  int nt = static_cast<int>(rng.range(0, max_terms));
  for (int t = 0; t < nt; ++t) {
    Monomial m(R->nvars());
    for (size_t i = 0; i < R->nvars(); ++i) m.e[i] = static_cast<int>(rng.range(0, max_deg));
    long c = rng.range(-max_coeff, max_coeff);
    p = p + Poly<K>::term(R, m, K(c));
  }
  return p;
}

inline bubbletree::Monomial random_monomial(const bubbletree::RingPtr& R, Rng& rng, int max_deg) {
  bubbletree::Monomial m(R->nvars());
  for (size_t i = 0; i < R->nvars(); ++i) m.e[i] = static_cast<int>(rng.range(0, max_deg));
  return m;
}

}  // namespace testutil
