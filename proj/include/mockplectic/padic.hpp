#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace mockplectic {

class PadicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p^e as a big integer.
mpz_class prime_power(long p, long e);

/// v_p(n) for n != 0.
int valuation_of(const mpz_class& n, long p);

/// Smallest positive quadratic non-residue mod p.
long smallest_nonresidue(long p);

/// Element x = p^v * u of Q_p known modulo p^(v+N).
///
/// A zero element carries only an absolute precision: it is known to be
/// divisible by p^absolute_precision().
class PadicNumber {
 public:
  PadicNumber() = default;

  static PadicNumber zero(long p, int absolute_precision);
  static PadicNumber from_integer(long p, const mpz_class& n, int relative_precision);
  static PadicNumber from_rational(long p, const mpq_class& q, int relative_precision);
  /// Builds p^v * u; u is reduced mod p^N and its p-part absorbed into v.
  static PadicNumber from_parts(long p, int v, const mpz_class& u, int relative_precision);

  long prime() const { return p_; }
  bool is_zero() const { return zero_; }
  /// Valuation; for zero, the known lower bound (the absolute precision).
  int valuation() const { return v_; }
  /// Unit part in [0, p^N); 0 for zero.
  const mpz_class& unit() const { return u_; }
  int precision() const { return zero_ ? 0 : n_; }
  int absolute_precision() const { return zero_ ? v_ : v_ + n_; }

  PadicNumber operator-() const;
  PadicNumber operator+(const PadicNumber& o) const;
  PadicNumber operator-(const PadicNumber& o) const;
  PadicNumber operator*(const PadicNumber& o) const;
  PadicNumber operator/(const PadicNumber& o) const;
  PadicNumber inverse() const;
  PadicNumber pow(long e) const;

  /// Lowers the relative precision (no-op if already lower).
  PadicNumber with_precision(int relative_precision) const;

  /// Representation equality (same valuation, unit and precision).
  bool operator==(const PadicNumber& o) const;
  /// Equality of the two numbers modulo the smaller absolute precision.
  bool agrees_with(const PadicNumber& o) const;

  /// Integer representative of x mod p^k, for v(x) >= 0 and k <= absolute precision.
  mpz_class residue(int k) const;
  /// Base-p digits of the unit, least significant first.
  std::string digits() const;

 private:
  friend class QuadExtNumber;
  void check_prime(const PadicNumber& o) const;

  long p_ = 0;
  bool zero_ = true;
  int v_ = 0;
  int n_ = 0;
  mpz_class u_ = 0;
};

/// Element of the unramified quadratic extension K_p = Q_p(s), s^2 = r,
/// with r the smallest non-residue mod p. Stored as p^v (a + b s) with
/// a + b s a unit known modulo p^N.
class QuadExtNumber {
 public:
  QuadExtNumber() = default;

  static QuadExtNumber zero(long p, int absolute_precision);
  static QuadExtNumber from_padic(const PadicNumber& a);
  static QuadExtNumber from_components(const PadicNumber& a, const PadicNumber& b);
  /// The adjoined square root s of the non-residue.
  static QuadExtNumber generator(long p, int relative_precision);
  /// p^v (a + b s) with integer a, b reduced modulo p^N.
  static QuadExtNumber from_parts(long p, int v, const mpz_class& a, const mpz_class& b,
                                  int relative_precision);

  long prime() const { return p_; }
  long nonresidue() const { return r_; }
  bool is_zero() const { return zero_; }
  int valuation() const { return v_; }
  int precision() const { return zero_ ? 0 : n_; }
  int absolute_precision() const { return zero_ ? v_ : v_ + n_; }
  const mpz_class& unit_a() const { return a_; }
  const mpz_class& unit_b() const { return b_; }

  /// Rational coordinate a in x = a + b s.
  PadicNumber a() const;
  /// Coordinate b in x = a + b s.
  PadicNumber b() const;
  /// True when the s-coordinate vanishes at the tracked precision.
  bool is_rational() const;

  QuadExtNumber operator-() const;
  QuadExtNumber operator+(const QuadExtNumber& o) const;
  QuadExtNumber operator-(const QuadExtNumber& o) const;
  QuadExtNumber operator*(const QuadExtNumber& o) const;
  QuadExtNumber operator/(const QuadExtNumber& o) const;
  QuadExtNumber inverse() const;
  QuadExtNumber pow(const mpz_class& e) const;
  QuadExtNumber pow(long e) const { return pow(mpz_class(e)); }

  /// sigma(a + b s) = a - b s.
  QuadExtNumber conjugate() const;
  PadicNumber norm() const;

  QuadExtNumber with_precision(int relative_precision) const;
  bool operator==(const QuadExtNumber& o) const;
  bool agrees_with(const QuadExtNumber& o) const;

 private:
  void check_prime(const QuadExtNumber& o) const;
  static QuadExtNumber normalized(long p, int v, mpz_class a, mpz_class b, int n);

  long p_ = 0;
  long r_ = 0;
  bool zero_ = true;
  int v_ = 0;
  int n_ = 0;
  mpz_class a_ = 0;
  mpz_class b_ = 0;
};

/// Branch of the p-adic logarithm, fixed by the value assigned to log(p).
struct LogBranch {
  QuadExtNumber log_p;  // zero for log_0

  static LogBranch principal(long p, int precision);
  /// The branch with log_q(q) = 0.
  static LogBranch vanishing_at(const PadicNumber& q);
};

/// Teichmuller lift of a unit of Z_p.
PadicNumber teichmuller(const PadicNumber& x);
/// Teichmuller lift of a unit of the unramified quadratic ring (omega^(p^2-1) = 1).
QuadExtNumber teichmuller(const QuadExtNumber& x);

/// <x> = x p^(-v) / omega(unit part), a principal unit.
PadicNumber angle(const PadicNumber& x);
QuadExtNumber angle(const QuadExtNumber& x);

/// Power-series logarithm of a principal unit (v(x - 1) >= 1).
QuadExtNumber log_principal(const QuadExtNumber& x);
PadicNumber log_principal(const PadicNumber& x);

/// log(p^k u) = k * branch.log_p + log_principal(<u>).
QuadExtNumber log(const QuadExtNumber& x, const LogBranch& branch);
QuadExtNumber log(const PadicNumber& x, const LogBranch& branch);

/// Square root of D in K_p for D a unit non-residue mod p. The result is c*s
/// with c in Z_p the Hensel lift seeded from the smaller residue square root
/// of D/r.
QuadExtNumber embed_quadratic(long p, const mpz_class& D, int relative_precision);

/// Square root in Z_p of a unit square, Hensel-lifted from the smaller residue root.
PadicNumber sqrt_unit(const PadicNumber& x);

}  // namespace mockplectic
