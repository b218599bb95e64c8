#include "mockplectic/padic.hpp"

#include <algorithm>
#include <climits>

namespace mockplectic {

mpz_class prime_power(long p, long e) {
  if (e < 0) throw PadicError("negative exponent in prime_power");
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  return r;
}

int valuation_of(const mpz_class& n, long p) {
  if (n == 0) throw PadicError("valuation of zero");
  mpz_class t = n;
  int v = 0;
  while (mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

long smallest_nonresidue(long p) {
  for (long r = 2; r < p; ++r) {
    mpz_class rr = r, pp = p;
    if (mpz_legendre(rr.get_mpz_t(), pp.get_mpz_t()) == -1) return r;
  }
  throw PadicError("no quadratic non-residue modulo " + std::to_string(p));
}

namespace {

mpz_class mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class inverse_mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw PadicError("element is not invertible");
  return r;
}

// Strips the p-part of a nonzero integer, returning the valuation.
int strip(mpz_class& n, long p) {
  int v = 0;
  while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(p));
    ++v;
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// PadicNumber

PadicNumber PadicNumber::zero(long p, int absolute_precision) {
  PadicNumber z;
  z.p_ = p;
  z.zero_ = true;
  z.v_ = absolute_precision;
  z.n_ = 0;
  z.u_ = 0;
  return z;
}

PadicNumber PadicNumber::from_parts(long p, int v, const mpz_class& u, int relative_precision) {
  if (relative_precision <= 0) return zero(p, v + std::max(relative_precision, 0));
  mpz_class m = prime_power(p, relative_precision);
  mpz_class w = mod(u, m);
  if (w == 0) return zero(p, v + relative_precision);
  int e = strip(w, p);
  PadicNumber x;
  x.p_ = p;
  x.zero_ = false;
  x.v_ = v + e;
  x.n_ = relative_precision - e;
  x.u_ = w;
  return x;
}

PadicNumber PadicNumber::from_integer(long p, const mpz_class& n, int relative_precision) {
  if (n == 0) return zero(p, INT_MAX / 4);
  mpz_class t = n;
  int v = strip(t, p);
  return from_parts(p, v, t, relative_precision);
}

PadicNumber PadicNumber::from_rational(long p, const mpq_class& q, int relative_precision) {
  if (q == 0) return zero(p, INT_MAX / 4);
  mpz_class num = q.get_num(), den = q.get_den();
  int v = strip(num, p) - strip(den, p);
  mpz_class m = prime_power(p, relative_precision);
  return from_parts(p, v, mod(num * inverse_mod(den, m), m), relative_precision);
}

void PadicNumber::check_prime(const PadicNumber& o) const {
  if (p_ != o.p_) throw PadicError("prime mismatch");
}

PadicNumber PadicNumber::operator-() const {
  if (zero_) return *this;
  return from_parts(p_, v_, -u_, n_);
}

PadicNumber PadicNumber::operator+(const PadicNumber& o) const {
  check_prime(o);
  int abs = std::min(absolute_precision(), o.absolute_precision());
  if (zero_ && o.zero_) return zero(p_, abs);
  int vmin = INT_MAX;
  if (!zero_) vmin = v_;
  if (!o.zero_) vmin = std::min(vmin, o.v_);
  if (vmin >= abs) return zero(p_, abs);
  mpz_class s = 0;
  if (!zero_) s += u_ * prime_power(p_, v_ - vmin);
  if (!o.zero_) s += o.u_ * prime_power(p_, o.v_ - vmin);
  return from_parts(p_, vmin, s, abs - vmin);
}

PadicNumber PadicNumber::operator-(const PadicNumber& o) const { return *this + (-o); }

PadicNumber PadicNumber::operator*(const PadicNumber& o) const {
  check_prime(o);
  // for a zero operand v_ is its absolute precision, so the bound is the same sum
  if (zero_ || o.zero_) return zero(p_, v_ + o.v_);
  int n = std::min(n_, o.n_);
  return from_parts(p_, v_ + o.v_, u_ * o.u_, n);
}

PadicNumber PadicNumber::inverse() const {
  if (zero_) throw PadicError("division by zero");
  mpz_class m = prime_power(p_, n_);
  return from_parts(p_, -v_, inverse_mod(u_, m), n_);
}

PadicNumber PadicNumber::operator/(const PadicNumber& o) const { return *this * o.inverse(); }

PadicNumber PadicNumber::pow(long e) const {
  if (e == 0) return from_integer(p_, 1, zero_ ? 1 : n_);
  if (zero_) {
    if (e < 0) throw PadicError("division by zero");
    return zero(p_, v_ * static_cast<int>(e));
  }
  mpz_class m = prime_power(p_, n_);
  mpz_class r;
  mpz_class ee = e < 0 ? -e : e;
  mpz_powm(r.get_mpz_t(), u_.get_mpz_t(), ee.get_mpz_t(), m.get_mpz_t());
  PadicNumber x = from_parts(p_, v_ * static_cast<int>(ee.get_si()), r, n_);
  return e < 0 ? x.inverse() : x;
}

PadicNumber PadicNumber::with_precision(int relative_precision) const {
  if (zero_ || relative_precision >= n_) return *this;
  return from_parts(p_, v_, u_, relative_precision);
}

bool PadicNumber::operator==(const PadicNumber& o) const {
  return p_ == o.p_ && zero_ == o.zero_ && v_ == o.v_ && n_ == o.n_ && u_ == o.u_;
}

bool PadicNumber::agrees_with(const PadicNumber& o) const { return (*this - o).is_zero(); }

mpz_class PadicNumber::residue(int k) const {
  if (zero_) {
    if (v_ < k) throw PadicError("insufficient precision for residue");
    return 0;
  }
  if (v_ < 0) throw PadicError("residue of a non-integral element");
  if (k > absolute_precision()) throw PadicError("insufficient precision for residue");
  if (v_ >= k) return 0;
  mpz_class m = prime_power(p_, k);
  return mod(u_ * prime_power(p_, v_), m);
}

std::string PadicNumber::digits() const {
  std::string s;
  mpz_class t = u_;
  for (int i = 0; i < precision(); ++i) {
    unsigned long d = mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(p_));
    if (!s.empty()) s += ' ';
    s += std::to_string(d);
  }
  return s;
}

// ---------------------------------------------------------------------------
// QuadExtNumber

QuadExtNumber QuadExtNumber::normalized(long p, int v, mpz_class a, mpz_class b, int n) {
  QuadExtNumber x;
  x.p_ = p;
  x.r_ = smallest_nonresidue(p);
  if (n <= 0) {
    x.zero_ = true;
    x.v_ = v + std::max(n, 0);
    return x;
  }
  mpz_class m = prime_power(p, n);
  a = mod(a, m);
  b = mod(b, m);
  if (a == 0 && b == 0) {
    x.zero_ = true;
    x.v_ = v + n;
    return x;
  }
  int e = 0;
  while (mpz_divisible_ui_p(a.get_mpz_t(), static_cast<unsigned long>(p)) &&
         mpz_divisible_ui_p(b.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(p));
    mpz_divexact_ui(b.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(p));
    ++e;
  }
  x.zero_ = false;
  x.v_ = v + e;
  x.n_ = n - e;
  x.a_ = a;
  x.b_ = b;
  return x;
}

QuadExtNumber QuadExtNumber::zero(long p, int absolute_precision) {
  QuadExtNumber z;
  z.p_ = p;
  z.r_ = smallest_nonresidue(p);
  z.zero_ = true;
  z.v_ = absolute_precision;
  return z;
}

QuadExtNumber QuadExtNumber::from_parts(long p, int v, const mpz_class& a, const mpz_class& b,
                                        int relative_precision) {
  return normalized(p, v, a, b, relative_precision);
}

QuadExtNumber QuadExtNumber::from_padic(const PadicNumber& a) {
  if (a.is_zero()) return zero(a.prime(), a.absolute_precision());
  return normalized(a.prime(), a.valuation(), a.unit(), 0, a.precision());
}

QuadExtNumber QuadExtNumber::from_components(const PadicNumber& a, const PadicNumber& b) {
  if (a.prime() != b.prime()) throw PadicError("prime mismatch");
  long p = a.prime();
  int abs = std::min(a.absolute_precision(), b.absolute_precision());
  int vmin = INT_MAX;
  if (!a.is_zero()) vmin = a.valuation();
  if (!b.is_zero()) vmin = std::min(vmin, b.valuation());
  if (vmin >= abs) return zero(p, abs);
  mpz_class ua = a.is_zero() ? mpz_class(0) : a.unit() * prime_power(p, a.valuation() - vmin);
  mpz_class ub = b.is_zero() ? mpz_class(0) : b.unit() * prime_power(p, b.valuation() - vmin);
  return normalized(p, vmin, ua, ub, abs - vmin);
}

QuadExtNumber QuadExtNumber::generator(long p, int relative_precision) {
  return normalized(p, 0, 0, 1, relative_precision);
}

PadicNumber QuadExtNumber::a() const {
  if (zero_) return PadicNumber::zero(p_, v_);
  return PadicNumber::from_parts(p_, v_, a_, n_);
}

PadicNumber QuadExtNumber::b() const {
  if (zero_) return PadicNumber::zero(p_, v_);
  return PadicNumber::from_parts(p_, v_, b_, n_);
}

bool QuadExtNumber::is_rational() const { return zero_ || b_ == 0; }

void QuadExtNumber::check_prime(const QuadExtNumber& o) const {
  if (p_ != o.p_) throw PadicError("prime mismatch");
}

QuadExtNumber QuadExtNumber::operator-() const {
  if (zero_) return *this;
  return normalized(p_, v_, -a_, -b_, n_);
}

QuadExtNumber QuadExtNumber::operator+(const QuadExtNumber& o) const {
  check_prime(o);
  int abs = std::min(absolute_precision(), o.absolute_precision());
  int vmin = INT_MAX;
  if (!zero_) vmin = v_;
  if (!o.zero_) vmin = std::min(vmin, o.v_);
  if (vmin >= abs) return zero(p_, abs);
  mpz_class a = 0, b = 0;
  if (!zero_) {
    mpz_class f = prime_power(p_, v_ - vmin);
    a += a_ * f;
    b += b_ * f;
  }
  if (!o.zero_) {
    mpz_class f = prime_power(p_, o.v_ - vmin);
    a += o.a_ * f;
    b += o.b_ * f;
  }
  return normalized(p_, vmin, a, b, abs - vmin);
}

QuadExtNumber QuadExtNumber::operator-(const QuadExtNumber& o) const { return *this + (-o); }

QuadExtNumber QuadExtNumber::operator*(const QuadExtNumber& o) const {
  check_prime(o);
  if (zero_ || o.zero_) return zero(p_, v_ + o.v_);
  int n = std::min(n_, o.n_);
  mpz_class a = a_ * o.a_ + r_ * b_ * o.b_;
  mpz_class b = a_ * o.b_ + b_ * o.a_;
  return normalized(p_, v_ + o.v_, a, b, n);
}

QuadExtNumber QuadExtNumber::inverse() const {
  if (zero_) throw PadicError("division by zero");
  mpz_class m = prime_power(p_, n_);
  mpz_class nrm = mod(a_ * a_ - r_ * b_ * b_, m);
  mpz_class inv = inverse_mod(nrm, m);
  return normalized(p_, -v_, a_ * inv, -b_ * inv, n_);
}

QuadExtNumber QuadExtNumber::operator/(const QuadExtNumber& o) const { return *this * o.inverse(); }

QuadExtNumber QuadExtNumber::pow(const mpz_class& e) const {
  if (e == 0) return normalized(p_, 0, 1, 0, zero_ ? 1 : n_);
  if (zero_) {
    if (e < 0) throw PadicError("division by zero");
    return zero(p_, v_ * static_cast<int>(e.get_si()));
  }
  mpz_class ee = abs(e);
  mpz_class m = prime_power(p_, n_);
  mpz_class ra = 1, rb = 0, ba = a_, bb = b_;
  size_t bits = mpz_sizeinbase(ee.get_mpz_t(), 2);
  for (size_t i = 0; i < bits; ++i) {
    if (mpz_tstbit(ee.get_mpz_t(), i)) {
      mpz_class na = mod(ra * ba + r_ * rb * bb, m);
      mpz_class nb = mod(ra * bb + rb * ba, m);
      ra = na;
      rb = nb;
    }
    if (i + 1 < bits) {
      mpz_class na = mod(ba * ba + r_ * bb * bb, m);
      mpz_class nb = mod(2 * ba * bb, m);
      ba = na;
      bb = nb;
    }
  }
  long vexp = 0;
  if (v_ != 0) {
    if (!ee.fits_slong_p()) throw PadicError("exponent overflow");
    vexp = static_cast<long>(v_) * ee.get_si();
    if (vexp > INT_MAX / 4 || vexp < -INT_MAX / 4) throw PadicError("valuation overflow");
  }
  QuadExtNumber x = normalized(p_, static_cast<int>(vexp), ra, rb, n_);
  return e < 0 ? x.inverse() : x;
}

QuadExtNumber QuadExtNumber::conjugate() const {
  if (zero_) return *this;
  return normalized(p_, v_, a_, -b_, n_);
}

PadicNumber QuadExtNumber::norm() const {
  if (zero_) return PadicNumber::zero(p_, 2 * v_);
  return PadicNumber::from_parts(p_, 2 * v_, a_ * a_ - r_ * b_ * b_, n_);
}

QuadExtNumber QuadExtNumber::with_precision(int relative_precision) const {
  if (zero_ || relative_precision >= n_) return *this;
  return normalized(p_, v_, a_, b_, relative_precision);
}

bool QuadExtNumber::operator==(const QuadExtNumber& o) const {
  return p_ == o.p_ && zero_ == o.zero_ && v_ == o.v_ && n_ == o.n_ && a_ == o.a_ && b_ == o.b_;
}

bool QuadExtNumber::agrees_with(const QuadExtNumber& o) const { return (*this - o).is_zero(); }

// ---------------------------------------------------------------------------
// Teichmuller lifts, angles, logarithms

PadicNumber teichmuller(const PadicNumber& x) {
  if (x.is_zero() || x.valuation() != 0) throw PadicError("teichmuller: non-unit input");
  long p = x.prime();
  int n = x.precision();
  mpz_class m = prime_power(p, n);
  mpz_class e = prime_power(p, n > 0 ? n - 1 : 0);
  mpz_class w;
  mpz_powm(w.get_mpz_t(), x.unit().get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return PadicNumber::from_parts(p, 0, w, n);
}

QuadExtNumber teichmuller(const QuadExtNumber& x) {
  if (x.is_zero() || x.valuation() != 0) throw PadicError("teichmuller: non-unit input");
  long p = x.prime();
  int n = x.precision();
  mpz_class e = prime_power(p, 2L * (n > 0 ? n - 1 : 0));
  return x.pow(e);
}

PadicNumber angle(const PadicNumber& x) {
  if (x.is_zero()) throw PadicError("angle of zero");
  PadicNumber u = PadicNumber::from_parts(x.prime(), 0, x.unit(), x.precision());
  return u / teichmuller(u);
}

QuadExtNumber angle(const QuadExtNumber& x) {
  if (x.is_zero()) throw PadicError("angle of zero");
  QuadExtNumber u = QuadExtNumber::from_parts(x.prime(), 0, x.unit_a(), x.unit_b(), x.precision());
  return u / teichmuller(u);
}

QuadExtNumber log_principal(const QuadExtNumber& x) {
  if (x.is_zero() || x.valuation() != 0) throw PadicError("log_principal: not a principal unit");
  long p = x.prime();
  long r = x.nonresidue();
  int n = x.precision();
  mpz_class w0 = x.unit_a() - 1, w1 = x.unit_b();
  mpz_class pn = prime_power(p, n);
  w0 = mod(w0, pn);
  if ((w0 % p) != 0 || (w1 % p) != 0) throw PadicError("log_principal: not a principal unit");
  if (w0 == 0 && w1 == 0) return QuadExtNumber::zero(p, n);
  int vw = std::min(w0 == 0 ? INT_MAX : valuation_of(w0, p), w1 == 0 ? INT_MAX : valuation_of(w1, p));
  // Terms W^k/k with k*vw - v_p(k) >= n vanish mod p^n; k <= n + 8 covers
  // every surviving term since v_p(k) <= log_p(k) < 8 for p >= 5.
  long kmax = 0;
  int guard = 0;
  for (long k = 1; k <= n + 8; ++k) {
    int vk = 0;
    for (long t = k; t % p == 0; t /= p) ++vk;
    if (k * vw - vk < n) {
      kmax = k;
      guard = std::max(guard, vk);
    }
  }
  mpz_class big = prime_power(p, n + guard);
  mpz_class sa = 0, sb = 0;
  mpz_class pa = 1, pb = 0;  // W^k
  for (long k = 1; k <= kmax; ++k) {
    mpz_class na = mod(pa * w0 + r * pb * w1, big);
    mpz_class nb = mod(pa * w1 + pb * w0, big);
    pa = na;
    pb = nb;
    long kk = k;
    int vk = 0;
    while (kk % p == 0) { kk /= p; ++vk; }
    mpz_class ta = pa, tb = pb;
    if (vk > 0) {
      mpz_class d = prime_power(p, vk);
      mpz_divexact(ta.get_mpz_t(), ta.get_mpz_t(), d.get_mpz_t());
      mpz_divexact(tb.get_mpz_t(), tb.get_mpz_t(), d.get_mpz_t());
    }
    mpz_class inv = inverse_mod(mpz_class(kk), pn);
    if (k % 2 == 0) inv = -inv;
    sa = mod(sa + ta * inv, pn);
    sb = mod(sb + tb * inv, pn);
  }
  return QuadExtNumber::from_parts(p, 0, sa, sb, n);
}

PadicNumber log_principal(const PadicNumber& x) { return log_principal(QuadExtNumber::from_padic(x)).a(); }

LogBranch LogBranch::principal(long p, int precision) { return LogBranch{QuadExtNumber::zero(p, precision)}; }

LogBranch LogBranch::vanishing_at(const PadicNumber& q) {
  if (q.is_zero() || q.valuation() == 0) throw PadicError("log branch needs v(q) != 0");
  QuadExtNumber l = log_principal(QuadExtNumber::from_padic(angle(q)));
  PadicNumber vq = PadicNumber::from_integer(q.prime(), q.valuation(), q.precision());
  return LogBranch{-(l / QuadExtNumber::from_padic(vq))};
}

QuadExtNumber log(const QuadExtNumber& x, const LogBranch& branch) {
  if (x.is_zero()) throw PadicError("log of zero");
  QuadExtNumber l = log_principal(angle(x));
  if (x.valuation() == 0) return l;
  PadicNumber k = PadicNumber::from_integer(x.prime(), x.valuation(), x.precision());
  return l + branch.log_p * QuadExtNumber::from_padic(k);
}

QuadExtNumber log(const PadicNumber& x, const LogBranch& branch) {
  return log(QuadExtNumber::from_padic(x), branch);
}

PadicNumber sqrt_unit(const PadicNumber& x) {
  if (x.is_zero() || x.valuation() != 0) throw PadicError("sqrt_unit: non-unit input");
  long p = x.prime();
  long res = mpz_class(x.unit() % p).get_si();
  long root = -1;
  for (long c = 1; c < p; ++c)
    if ((c * c) % p == res) { root = c; break; }
  if (root < 0) throw PadicError("sqrt_unit: not a square");
  int n = x.precision();
  mpz_class m = prime_power(p, n);
  mpz_class c = root;
  for (int k = 1; k < n; k *= 2) {
    // Newton step c <- c - (c^2 - x)/(2c)
    c = mod(c - (c * c - x.unit()) * inverse_mod(2 * c, m), m);
  }
  return PadicNumber::from_parts(p, 0, c, n);
}

QuadExtNumber embed_quadratic(long p, const mpz_class& D, int relative_precision) {
  mpz_class pp = p;
  if (mpz_divisible_ui_p(D.get_mpz_t(), static_cast<unsigned long>(p)))
    throw PadicError("embed_quadratic: p ramifies in Q(sqrt D)");
  if (mpz_legendre(mod(D, pp).get_mpz_t(), pp.get_mpz_t()) != -1)
    throw PadicError("embed_quadratic: D is a square mod p (p splits)");
  long r = smallest_nonresidue(p);
  PadicNumber t = PadicNumber::from_rational(p, mpq_class(D, r), relative_precision);
  PadicNumber c = sqrt_unit(t);
  return QuadExtNumber::from_parts(p, 0, 0, c.unit(), relative_precision);
}

}  // namespace mockplectic
