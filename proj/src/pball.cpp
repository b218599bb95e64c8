#include "mockplectic/pball.hpp"

#include <stdexcept>
#include <tuple>

namespace mockplectic {

namespace {

mpz_class pmod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Brings center/level to canonical (numerator, denominator exponent).
std::pair<mpz_class, int> canonical_center(long p, const mpq_class& center, int level) {
  mpz_class num = center.get_num();
  mpz_class den = center.get_den();
  int k = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(p));
    ++k;
  }
  if (level + k <= 0) return {0, 0};
  mpz_class mod = prime_power(p, level + k);
  if (den != 1) {
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
    num *= inv;
  }
  num = pmod(num, mod);
  if (num == 0) return {0, 0};
  while (k > 0 && mpz_divisible_ui_p(num.get_mpz_t(), static_cast<unsigned long>(p))) {
    mpz_divexact_ui(num.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(p));
    --k;
  }
  return {num, k};
}

mpq_class make_center(long p, const mpz_class& num, int den_exp) {
  mpq_class c(num, prime_power(p, den_exp));
  c.canonicalize();
  return c;
}

// v(x - y) >= m for rationals, with x == y counting as true.
bool close(const mpq_class& x, const mpq_class& y, int m, long p) {
  mpq_class d = x - y;
  if (d == 0) return true;
  return valuation_of(d, p) >= m;
}

}  // namespace

int valuation_of(const mpq_class& q, long p) {
  if (q == 0) throw PadicError("valuation of zero");
  return valuation_of(mpz_class(q.get_num()), p) - valuation_of(mpz_class(q.get_den()), p);
}

// ---------------------------------------------------------------------------
// Cusp

Cusp Cusp::make(const mpz_class& num, const mpz_class& den) {
  if (num == 0 && den == 0) throw std::invalid_argument("0/0 is not a point of P^1(Q)");
  if (den == 0) return infinity();
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  Cusp c{num / g, den / g};
  if (c.den < 0) {
    c.num = -c.num;
    c.den = -c.den;
  }
  return c;
}

Cusp Cusp::rational(const mpq_class& q) { return make(q.get_num(), q.get_den()); }

mpq_class Cusp::value() const {
  if (is_infinity()) throw std::logic_error("value of the cusp at infinity");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::string Cusp::str() const {
  if (is_infinity()) return "oo";
  if (den == 1) return num.get_str();
  return num.get_str() + "/" + den.get_str();
}

// ---------------------------------------------------------------------------
// Ball

Ball Ball::affine(long p, const mpq_class& center, int level) {
  auto [num, k] = canonical_center(p, center, level);
  return Ball{p, false, num, k, level};
}

Ball Ball::complement_of(long p, const mpq_class& center, int level) {
  Ball b = affine(p, center, level);
  b.coaffine = true;
  return b;
}

mpq_class Ball::center() const { return make_center(p, center_num, center_den_exp); }

Ball Ball::complement() const {
  Ball b = *this;
  b.coaffine = !coaffine;
  return b;
}

bool Ball::contains(const Cusp& x) const {
  bool in_affine = !x.is_infinity() && close(x.value(), center(), level, p);
  return coaffine ? !in_affine : in_affine;
}

bool Ball::contains(const PadicNumber& x) const {
  if (x.prime() != p) throw PadicError("prime mismatch");
  mpq_class c = center();
  PadicNumber d = x;
  if (c != 0) {
    int vc = valuation_of(c, p);
    int rel = std::max(1, x.absolute_precision() - vc);
    d = x - PadicNumber::from_rational(p, c, rel);
  }
  bool in_affine;
  if (d.is_zero()) {
    if (d.absolute_precision() < level) throw PadicError("precision insufficient to decide membership");
    in_affine = true;
  } else {
    in_affine = d.valuation() >= level;
  }
  return coaffine ? !in_affine : in_affine;
}

bool Ball::contains(const Ball& other) const {
  if (!coaffine && !other.coaffine)
    return other.level >= level && close(other.center(), center(), level, p);
  if (!coaffine && other.coaffine) return false;
  if (coaffine && !other.coaffine) return complement().disjoint_from(other);
  return other.complement().contains(complement());
}

bool Ball::disjoint_from(const Ball& other) const {
  if (coaffine && other.coaffine) return false;
  if (!coaffine && !other.coaffine) {
    bool meet = close(other.center(), center(), level, p) || close(center(), other.center(), other.level, p);
    return !meet;
  }
  const Ball& aff = coaffine ? other : *this;
  const Ball& co = coaffine ? *this : other;
  return co.complement().contains(aff);
}

Cusp Ball::sample() const {
  if (coaffine) return Cusp::infinity();
  return Cusp::rational(center());
}

bool Ball::operator<(const Ball& o) const {
  return std::tie(coaffine, level, center_den_exp, center_num) <
         std::tie(o.coaffine, o.level, o.center_den_exp, o.center_num);
}

std::string Ball::str() const {
  std::string s = center().get_str() + " + " + std::to_string(p) + "^" + std::to_string(level) + " Z_p";
  return coaffine ? "P1 - (" + s + ")" : s;
}

// ---------------------------------------------------------------------------
// Vertex / edges

Vertex Vertex::make(long p, const mpq_class& center, int level) {
  auto [num, k] = canonical_center(p, center, level);
  return Vertex{p, num, k, level};
}

mpq_class Vertex::center() const { return make_center(p, center_num, center_den_exp); }

Ball Vertex::ball() const { return Ball{p, false, center_num, center_den_exp, level}; }

std::string Vertex::str() const { return "[" + center().get_str() + ", " + std::to_string(level) + "]"; }

OrientedEdge OrientedEdge::standard(long p) { return OrientedEdge{Ball::complement_of(p, 0, 0)}; }

Vertex OrientedEdge::source() const {
  if (ball.coaffine) return Vertex::make(ball.p, ball.center(), ball.level);
  return Vertex::make(ball.p, ball.center(), ball.level - 1);
}

Vertex OrientedEdge::target() const { return reverse().source(); }

std::vector<OrientedEdge> edges_at(const Vertex& v) {
  std::vector<OrientedEdge> out;
  out.reserve(static_cast<size_t>(v.p) + 1);
  mpq_class c = v.center();
  out.push_back(OrientedEdge{Ball::complement_of(v.p, c, v.level)});
  mpq_class step(prime_power(v.p, v.level >= 0 ? v.level : 0), prime_power(v.p, v.level >= 0 ? 0 : -v.level));
  step.canonicalize();
  for (long j = 0; j < v.p; ++j)
    out.push_back(OrientedEdge{Ball::affine(v.p, c + j * step, v.level + 1)});
  return out;
}

std::vector<Ball> refine(const Ball& b) {
  std::vector<Ball> out;
  out.reserve(static_cast<size_t>(b.p));
  mpq_class c = b.center();
  auto pw = [&](int e) {
    mpq_class s(prime_power(b.p, e >= 0 ? e : 0), prime_power(b.p, e >= 0 ? 0 : -e));
    s.canonicalize();
    return s;
  };
  if (!b.coaffine) {
    mpq_class step = pw(b.level);
    for (long j = 0; j < b.p; ++j) out.push_back(Ball::affine(b.p, c + j * step, b.level + 1));
  } else {
    out.push_back(Ball::complement_of(b.p, c, b.level - 1));
    mpq_class step = pw(b.level - 1);
    for (long j = 1; j < b.p; ++j) out.push_back(Ball::affine(b.p, c + j * step, b.level));
  }
  return out;
}

std::vector<Ball> covering(long p, int depth) {
  if (depth < 1) throw std::invalid_argument("covering depth must be >= 1");
  std::vector<Ball> cur;
  for (const auto& e : edges_at(Vertex::standard(p))) cur.push_back(e.ball);
  for (int d = 1; d < depth; ++d) {
    std::vector<Ball> next;
    next.reserve(cur.size() * static_cast<size_t>(p));
    for (const auto& b : cur)
      for (auto& c : refine(b)) next.push_back(std::move(c));
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// GammaElement

GammaElement::GammaElement(long p, mpq_class a, mpq_class b, mpq_class c, mpq_class d)
    : p_(p), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  a_.canonicalize();
  b_.canonicalize();
  c_.canonicalize();
  d_.canonicalize();
  if (a_ * d_ - b_ * c_ != 1) throw std::invalid_argument("GammaElement must have determinant 1");
  for (const mpq_class* x : {&a_, &b_, &c_, &d_}) {
    mpz_class den = x->get_den();
    while (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p)))
      mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(p));
    if (den != 1) throw std::invalid_argument("GammaElement entries must lie in Z[1/p]");
  }
}

GammaElement GammaElement::operator*(const GammaElement& o) const {
  return GammaElement(p_, a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_,
                      c_ * o.b_ + d_ * o.d_);
}

GammaElement GammaElement::inverse() const { return GammaElement(p_, d_, -b_, -c_, a_); }

Cusp GammaElement::act(const Cusp& x) const {
  if (x.is_infinity()) {
    if (c_ == 0) return Cusp::infinity();
    return Cusp::rational(a_ / c_);
  }
  mpq_class v = x.value();
  mpq_class den = c_ * v + d_;
  if (den == 0) return Cusp::infinity();
  return Cusp::rational((a_ * v + b_) / den);
}

Ball GammaElement::act(const Ball& ball) const {
  if (ball.coaffine) return act(ball.complement()).complement();
  const long p = p_;
  mpq_class x0 = ball.center();
  int m = ball.level;
  if (c_ == 0) {
    return Ball::affine(p, (a_ * x0 + b_) / d_, m + valuation_of(a_, p) - valuation_of(d_, p));
  }
  mpq_class pole = -d_ / c_;
  if (close(pole, x0, m, p)) {
    return Ball::complement_of(p, a_ / c_, 1 - m - 2 * valuation_of(c_, p));
  }
  mpq_class w = c_ * x0 + d_;
  return Ball::affine(p, (a_ * x0 + b_) / w, m - 2 * valuation_of(w, p));
}

QuadExtNumber GammaElement::act(const QuadExtNumber& z) const {
  int prec = z.absolute_precision() + 8;
  auto lift = [&](const mpq_class& q) {
    if (q == 0) return QuadExtNumber::zero(p_, prec + 8);
    return QuadExtNumber::from_padic(PadicNumber::from_rational(p_, q, prec + 8 - valuation_of(q, p_)));
  };
  QuadExtNumber num = lift(a_) * z + lift(b_);
  QuadExtNumber den = lift(c_) * z + lift(d_);
  return num / den;
}

std::string GammaElement::str() const {
  return "[[" + a_.get_str() + "," + b_.get_str() + "],[" + c_.get_str() + "," + d_.get_str() + "]]";
}

// ---------------------------------------------------------------------------

EdgeReduction reduce_edge(const OrientedEdge& e) {
  const Ball& b = e.ball;
  const long p = b.p;
  Ball base = b.coaffine ? b.complement() : b;
  int m = base.level;
  GammaElement shift(p, 1, -base.center(), 0, 1);
  // floor(m / 2) for either sign of m
  int half = m >= 0 ? m / 2 : -((-m + 1) / 2);
  int k = -half;
  mpq_class pk = k >= 0 ? mpq_class(prime_power(p, k)) : mpq_class(1, prime_power(p, -k));
  pk.canonicalize();
  GammaElement scale(p, pk, 0, 0, 1 / pk);
  GammaElement gamma = scale * shift;
  int orientation;
  if (m + 2 * k == 0) {
    orientation = -1;
  } else {
    gamma = GammaElement(p, 0, -1, 1, 0) * gamma;
    orientation = 1;
  }
  if (b.coaffine) orientation = -orientation;
  Ball image = gamma.act(b);
  Ball target = OrientedEdge::standard(p).ball;
  if (!(orientation == 1 ? image == target : image == target.complement()))
    throw std::logic_error("reduce_edge failed to reach the standard edge");
  return EdgeReduction{gamma, orientation};
}

Vertex reduction_point(const QuadExtNumber& z) {
  PadicNumber y = z.b();
  if (y.is_zero()) throw PadicError("reduction_point: z lies in Q_p at working precision");
  long p = z.prime();
  int m = y.valuation();
  PadicNumber x = z.a();
  mpq_class center = 0;
  if (!x.is_zero() && x.valuation() < m) {
    mpz_class u = pmod(x.unit(), prime_power(p, m - x.valuation()));
    int vx = x.valuation();
    center = vx >= 0 ? mpq_class(u * prime_power(p, vx)) : mpq_class(u, prime_power(p, -vx));
    center.canonicalize();
  }
  return Vertex::make(p, center, m);
}

}  // namespace mockplectic
