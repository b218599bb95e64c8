#pragma once

// Word-size arithmetic in O_K / p^N for the unramified quadratic extension.

#include "mockplectic/padic.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mockplectic::detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

struct FastRing {
  long p = 0;
  long r = 0;  // s^2 = r
  int N = 0;
  u64 M = 1;   // p^N
  std::vector<u64> pow;  // p^0 .. p^N

  FastRing(long p_, int N_) : p(p_), r(smallest_nonresidue(p_)), N(N_) {
    pow.push_back(1);
    for (int i = 0; i < N; ++i) {
      if (pow.back() > (~u64(0) >> 2) / static_cast<u64>(p)) throw std::invalid_argument("p^N exceeds word size");
      pow.push_back(pow.back() * static_cast<u64>(p));
    }
    M = pow.back();
  }

  static int max_precision(long p) {
    int n = 0;
    u64 x = 1;
    while (x <= (~u64(0) >> 2) / static_cast<u64>(p)) {
      x *= static_cast<u64>(p);
      ++n;
    }
    return n;
  }

  u64 mul(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % M); }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= M ? s - M : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + M - b; }
  u64 reduce(i128 x) const {
    i128 m = static_cast<i128>(M);
    i128 v = x % m;
    return static_cast<u64>(v < 0 ? v + m : v);
  }
};

/// p^v (a + b s) with (a, b) not both divisible by p, known modulo p^(N - loss).
struct FastQuad {
  int v = 0;
  u64 a = 1, b = 0;
  int loss = 0;
};

struct UnitProduct {
  u64 a = 1, b = 0;
};

inline void mul_into(const FastRing& R, UnitProduct& acc, u64 a, u64 b) {
  u64 na = R.add(R.mul(acc.a, a), R.mul(R.mul(acc.b, b), static_cast<u64>(R.r)));
  u64 nb = R.add(R.mul(acc.a, b), R.mul(acc.b, a));
  acc.a = na;
  acc.b = nb;
}

inline int vp64(u64 x, long p, int cap) {
  if (x == 0) return cap;
  int k = 0;
  while (x % static_cast<u64>(p) == 0 && k < cap) {
    x /= static_cast<u64>(p);
    ++k;
  }
  return k;
}

/// z - t for t = C / p^K rational.
inline FastQuad sub_rational(const FastRing& R, const FastQuad& z, i128 C, int K) {
  if (C == 0) return z;
  int vc = 0;
  while (C % R.p == 0) {
    C /= R.p;
    ++vc;
  }
  int vt = vc - K;
  u64 tu = R.reduce(C);
  int m = std::min(z.v, vt);
  auto shift = [&](u64 x, int e) -> u64 { return e >= R.N ? 0 : R.mul(x, R.pow[e]); };
  u64 A = R.sub(shift(z.a, z.v - m), shift(tu, vt - m));
  u64 B = shift(z.b, z.v - m);
  int j = std::min(vp64(A, R.p, R.N), vp64(B, R.p, R.N));
  if (j >= R.N - z.loss) throw PadicError("precision exhausted: sample point too close to z");
  FastQuad out;
  out.v = m + j;
  out.a = A / R.pow[j];
  out.b = B / R.pow[j];
  out.loss = std::max(z.loss, j);
  return out;
}

inline FastQuad from_quad(const FastRing& R, const QuadExtNumber& x) {
  if (x.is_zero()) throw PadicError("zero has no fast representation");
  if (x.precision() < R.N) throw PadicError("insufficient precision for fast arithmetic");
  FastQuad f;
  f.v = x.valuation();
  f.a = static_cast<u64>(mpz_class(x.unit_a() % mpz_class(static_cast<unsigned long>(R.M))).get_ui());
  f.b = static_cast<u64>(mpz_class(x.unit_b() % mpz_class(static_cast<unsigned long>(R.M))).get_ui());
  return f;
}

inline QuadExtNumber to_quad(const FastRing& R, int v, u64 a, u64 b, int loss) {
  return QuadExtNumber::from_parts(R.p, v, mpz_class(static_cast<unsigned long>(a)),
                                   mpz_class(static_cast<unsigned long>(b)), R.N - loss);
}

}  // namespace mockplectic::detail
