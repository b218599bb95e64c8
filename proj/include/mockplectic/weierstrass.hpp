#pragma once

#include <gmpxx.h>

#include <ostream>
#include <stdexcept>

namespace mockplectic {

/// a + b sqrt(D) with rational a, b.
struct QuadRational {
  mpq_class a = 0;
  mpq_class b = 0;
  mpz_class D = 0;

  QuadRational() = default;
  QuadRational(const mpq_class& x, const mpz_class& d) : a(x), b(0), D(d) {}
  QuadRational(const mpq_class& x, const mpq_class& y, const mpz_class& d) : a(x), b(y), D(d) {}

  QuadRational operator+(const QuadRational& o) const { return {a + o.a, b + o.b, D}; }
  QuadRational operator-(const QuadRational& o) const { return {a - o.a, b - o.b, D}; }
  QuadRational operator-() const { return {-a, -b, D}; }
  QuadRational operator*(const QuadRational& o) const {
    return {a * o.a + D * b * o.b, a * o.b + b * o.a, D};
  }
  QuadRational conjugate() const { return {a, -b, D}; }
  mpq_class norm() const { return a * a - D * b * b; }
  QuadRational operator/(const QuadRational& o) const {
    mpq_class n = o.norm();
    if (n == 0) throw std::domain_error("division by zero in Q(sqrt D)");
    QuadRational t = *this * o.conjugate();
    return {t.a / n, t.b / n, D};
  }
  bool operator==(const QuadRational& o) const { return a == o.a && b == o.b; }
  bool operator!=(const QuadRational& o) const { return !(*this == o); }
  bool is_zero() const { return a == 0 && b == 0; }
};

inline std::ostream& operator<<(std::ostream& os, const QuadRational& x) {
  return os << x.a.get_str() << " + " << x.b.get_str() << "*sqrt(" << x.D.get_str() << ")";
}

template <class F>
struct WPoint {
  bool infinity = true;
  F x{}, y{};
  static WPoint zero() { return WPoint{}; }
  static WPoint affine(const F& x, const F& y) { return WPoint{false, x, y}; }
  bool operator==(const WPoint& o) const {
    if (infinity || o.infinity) return infinity == o.infinity;
    return x == o.x && y == o.y;
  }
};

/// Exact group law on y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F.
template <class F>
struct WCurve {
  F a1, a2, a3, a4, a6;

  bool contains(const WPoint<F>& P) const {
    if (P.infinity) return true;
    const F& x = P.x;
    const F& y = P.y;
    return y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6;
  }
  WPoint<F> neg(const WPoint<F>& P) const {
    if (P.infinity) return P;
    return WPoint<F>::affine(P.x, -P.y - a1 * P.x - a3);
  }
  WPoint<F> add(const WPoint<F>& P, const WPoint<F>& Q) const {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    F lambda, nu;
    if (P.x == Q.x) {
      F s = P.y + Q.y + a1 * Q.x + a3;
      if (s == F(s - s)) return WPoint<F>::zero();
      F x = P.x;
      lambda = (x * x + x * x + x * x + (a2 + a2) * x + a4 - a1 * P.y) / (P.y + P.y + a1 * x + a3);
    } else {
      lambda = (Q.y - P.y) / (Q.x - P.x);
    }
    nu = P.y - lambda * P.x;
    F x3 = lambda * lambda + a1 * lambda - a2 - P.x - Q.x;
    F y3 = -(lambda + a1) * x3 - nu - a3;
    return WPoint<F>::affine(x3, y3);
  }
  WPoint<F> mul(long n, const WPoint<F>& P) const {
    if (n < 0) return mul(-n, neg(P));
    WPoint<F> R = WPoint<F>::zero(), B = P;
    while (n > 0) {
      if (n & 1) R = add(R, B);
      B = add(B, B);
      n >>= 1;
    }
    return R;
  }
};

}  // namespace mockplectic
