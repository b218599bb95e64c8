#include "mockplectic/shpoint.hpp"

#include <algorithm>

namespace mockplectic {

namespace {

bool is_square(const mpz_class& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

QuadExtNumber lift(long p, const mpq_class& q, int prec) {
  if (q == 0) return QuadExtNumber::zero(p, prec);
  return QuadExtNumber::from_padic(PadicNumber::from_rational(p, q, prec));
}

}  // namespace

RMPoint RMPoint::make(const mpz_class& A, const mpz_class& B, const mpz_class& C, long p, int precision) {
  if (A == 0) throw std::invalid_argument("RM form needs A != 0");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), C.get_mpz_t());
  if (g != 1) throw std::invalid_argument("RM form must be primitive");
  RMPoint t;
  t.A = A;
  t.B = B;
  t.C = C;
  t.D = B * B - 4 * A * C;
  t.p = p;
  if (t.D <= 0 || is_square(t.D)) throw std::invalid_argument("discriminant must be positive and not a square");
  mpz_class pp = p;
  mpz_class Dm = t.D % pp;
  if (Dm < 0) Dm += pp;
  if (Dm == 0 || mpz_legendre(Dm.get_mpz_t(), pp.get_mpz_t()) != -1)
    throw std::invalid_argument("p must be inert in Q(sqrt D)");
  auto sq = embed_quadratic(p, t.D, precision + 4);
  t.tau = ((sq - lift(p, mpq_class(B), precision + 4)) / lift(p, mpq_class(2 * A), precision + 4))
              .with_precision(precision);
  return t;
}

RMPoint RMPoint::conjugate() const {
  return make(-A, -B, -C, p, tau.precision());
}

RMPoint RMPoint::transform(const GammaElement& g) const {
  for (const auto* e : {&g.a(), &g.b(), &g.c(), &g.d()})
    if (e->get_den() != 1) throw std::invalid_argument("RM transport needs an integral matrix");
  mpz_class a = g.a().get_num(), b = g.b().get_num(), c = g.c().get_num(), d = g.d().get_num();
  mpz_class A2 = A * d * d - B * c * d + C * c * c;
  mpz_class B2 = -2 * A * b * d + B * (a * d + b * c) - 2 * C * a * c;
  mpz_class C2 = A * b * b - B * a * b + C * a * a;
  RMPoint t = make(A2, B2, C2, p, tau.precision());
  if (!t.tau.agrees_with(g.act(tau))) t = make(-A2, -B2, -C2, p, tau.precision());
  return t;
}

std::pair<mpz_class, mpz_class> pell_four(const mpz_class& D) {
  for (long y = 1; y <= 2000000; ++y) {
    mpz_class x2 = D * y * y + 4;
    if (is_square(x2)) {
      mpz_class x;
      mpz_sqrt(x.get_mpz_t(), x2.get_mpz_t());
      return {x, mpz_class(y)};
    }
  }
  // continued fraction of sqrt D for x^2 - D y^2 = 1
  mpz_class a0;
  mpz_sqrt(a0.get_mpz_t(), D.get_mpz_t());
  mpz_class m = 0, d = 1, a = a0;
  mpz_class h1 = 1, h = a0, k1 = 0, k = 1;
  for (int it = 0; it < 100000; ++it) {
    if (h * h - D * k * k == 1) return {2 * h, 2 * k};
    m = d * a - m;
    d = (D - m * m) / d;
    a = (a0 + m) / d;
    mpz_class h2 = a * h + h1, k2 = a * k + k1;
    h1 = h;
    k1 = k;
    h = h2;
    k = k2;
  }
  throw std::runtime_error("Pell solver failed");
}

AutomorphGamma order_and_gamma(const RMPoint& t) {
  auto [x, y] = pell_four(t.D);
  AutomorphGamma out;
  out.x = x;
  out.y = y;
  mpq_class a = mpq_class(x - t.B * y, 2), b = mpq_class(-t.C * y), c = mpq_class(t.A * y),
            d = mpq_class(x + t.B * y, 2);
  out.gamma = GammaElement(t.p, a, b, c, d);
  if (a * d - b * c != 1) throw std::logic_error("automorph has determinant != 1");
  return out;
}

StarkHeegnerPoint stark_heegner(std::shared_ptr<const EigenSymbol> symbol, const RMPoint& tau, int depth,
                                const Cusp& r, const IntegrationOptions& opts) {
  if (depth < 2) throw std::invalid_argument("Stark-Heegner depth must be >= 2");
  StarkHeegnerPoint out;
  out.gamma = order_and_gamma(tau).gamma;
  out.r = r;
  out.depth = depth;
  HarmonicMeasure mu(std::move(symbol), r, out.gamma.act(r));
  auto K = Kernel::log_cross_ratio(tau.tau.conjugate(), tau.tau);
  IntegrationOptions o = opts;
  o.branch = LogBranch{};
  Integral I = riemann_integrate(mu, K, depth, o);
  Integral prev = riemann_integrate(mu, K, depth - 1, o);
  out.u_plus = I.product_plus;
  out.u_minus = I.product_minus;
  out.log_plus = I.plus;
  out.log_minus = I.minus;
  out.ord_plus = I.ord_plus;
  out.ord_minus = I.ord_minus;
  auto one = QuadExtNumber::from_padic(PadicNumber::from_integer(tau.p, 1, I.precision));
  auto agree = [&](const QuadExtNumber& a, const QuadExtNumber& b) {
    auto d = a / b - one;
    return d.is_zero() ? d.absolute_precision() : d.valuation();
  };
  out.agreement = std::min(agree(I.product_plus, prev.product_plus), agree(I.product_minus, prev.product_minus));
  return out;
}

namespace {

PadicNumber sigma_sum(const PadicNumber& q, int k, int prec) {
  long p = q.prime();
  PadicNumber s = PadicNumber::zero(p, prec);
  PadicNumber qn = q.with_precision(prec);
  auto one = PadicNumber::from_integer(p, 1, prec);
  for (long n = 1; static_cast<long>(q.valuation()) * n < prec + 2; ++n) {
    mpz_class nk = 1;
    for (int i = 0; i < k; ++i) nk *= n;
    s = s + PadicNumber::from_integer(p, nk, prec) * qn / (one - qn);
    qn = qn * q;
  }
  return s;
}

QuadExtNumber qconst(long p, const mpq_class& c, int prec) {
  if (c == 0) return QuadExtNumber::zero(p, prec);
  return QuadExtNumber::from_padic(PadicNumber::from_rational(p, c, prec));
}

QuadExtNumber from_p(const PadicNumber& x) {
  if (x.is_zero()) return QuadExtNumber::zero(x.prime(), x.absolute_precision());
  return QuadExtNumber::from_padic(x);
}

}  // namespace

TateCurve tate_curve(const PadicNumber& q) {
  long p = q.prime();
  int prec = q.precision() + 2;
  TateCurve T;
  T.q = q;
  PadicNumber s3 = sigma_sum(q, 3, prec), s5 = sigma_sum(q, 5, prec);
  auto c = [&](long n) { return PadicNumber::from_integer(p, n, prec); };
  T.a4 = -(c(5) * s3);
  T.a6 = -((c(5) * s3 + c(7) * s5) / c(12));
  T.c4 = c(1) + c(240) * s3;
  T.c6 = c(-1) + c(504) * s5;
  return T;
}

KpPoint tate_point(const TateCurve& Eq, const QuadExtNumber& u_in) {
  long p = Eq.q.prime();
  int vq = Eq.q.valuation();
  QuadExtNumber u = u_in;
  int v = u.valuation();
  int k = v >= 0 ? v / vq : -((-v + vq - 1) / vq);
  if (k != 0) u = u / from_p(Eq.q).pow(k);
  int prec = u.precision();
  auto one = qconst(p, 1, prec + 4);
  KpPoint P;
  QuadExtNumber w = one - u;
  if (w.is_zero() || w.valuation() >= prec) return P;
  P.infinity = false;
  QuadExtNumber X = u / (w * w);
  QuadExtNumber Y = u * u / (w * w * w);
  QuadExtNumber ui = u.inverse();
  QuadExtNumber qn = from_p(Eq.q);
  QuadExtNumber Q = qn;
  for (long n = 1; static_cast<long>(vq) * n < prec + 2 * vq + 4; ++n) {
    QuadExtNumber a = qn * u, b = qn * ui;
    QuadExtNumber da = one - a, db = one - b, dq = one - qn;
    QuadExtNumber nq = qconst(p, n, prec + 4) * qn / dq;
    X = X + a / (da * da) + b / (db * db) - nq - nq;
    Y = Y + a * a / (da * da * da) - b / (db * db * db) + nq;
    qn = qn * Q;
  }
  P.x = X;
  P.y = Y;
  return P;
}

QuadExtNumber weierstrass_residual(const KpPoint& P, const PadicNumber& a1, const PadicNumber& a2,
                                   const PadicNumber& a3, const PadicNumber& a4, const PadicNumber& a6) {
  const auto &x = P.x, &y = P.y;
  return y * y + from_p(a1) * x * y + from_p(a3) * y - (x * x * x + from_p(a2) * x * x + from_p(a4) * x + from_p(a6));
}

TateIsomorphism tate_isomorphism(const TateCurve& Eq, const CurveData& E, int precision) {
  long p = Eq.q.prime();
  auto c4 = PadicNumber::from_integer(p, E.c4(), precision);
  auto c6 = PadicNumber::from_integer(p, E.c6(), precision);
  PadicNumber l2 = (c6 * Eq.c4) / (c4 * Eq.c6);
  if (l2.valuation() != 0) throw PadicError("Tate isomorphism scale is not a unit");
  TateIsomorphism out;
  mpz_class pp = p;
  mpz_class res = l2.residue(1);
  if (mpz_legendre(res.get_mpz_t(), pp.get_mpz_t()) == 1) {
    out.lambda = QuadExtNumber::from_padic(sqrt_unit(l2));
  } else {
    long r = smallest_nonresidue(p);
    auto t = sqrt_unit(l2 / PadicNumber::from_integer(p, r, l2.precision()));
    out.lambda = QuadExtNumber::from_padic(t) * QuadExtNumber::generator(p, l2.precision());
  }
  return out;
}

KpPoint to_curve(const KpPoint& P, const TateCurve& Eq, const TateIsomorphism& iso, const CurveData& E) {
  (void)Eq;
  if (P.infinity) return P;
  long p = iso.lambda.prime();
  int prec = iso.lambda.precision() + 4;
  auto k = [&](const mpz_class& n) { return qconst(p, mpq_class(n), prec); };
  QuadExtNumber Xq = k(36) * P.x + k(3);
  QuadExtNumber Yq = k(108) * (k(2) * P.y + P.x);
  QuadExtNumber l2 = iso.lambda * iso.lambda;
  QuadExtNumber XE = l2 * Xq, YE = l2 * iso.lambda * Yq;
  KpPoint out;
  out.infinity = false;
  out.x = (XE - k(3 * E.b2())) / k(36);
  out.y = (YE / k(108) - k(E.a1) * out.x - k(E.a3)) / k(2);
  return out;
}

KpPoint tate_parametrize(const QuadExtNumber& u, const TatePeriod& T, const CurveData& E) {
  TateCurve Eq = tate_curve(T.q);
  auto iso = tate_isomorphism(Eq, E, T.q.precision());
  return to_curve(tate_point(Eq, u), Eq, iso, E);
}

namespace {

using PSeries = std::vector<PadicNumber>;

PSeries ps_mul(const PSeries& a, const PSeries& b, size_t len, long p, int prec) {
  PSeries out(len, PadicNumber::zero(p, prec));
  for (size_t i = 0; i < a.size() && i < len; ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size() && i + j < len; ++j)
      if (!b[j].is_zero()) out[i + j] = out[i + j] + a[i] * b[j];
  }
  return out;
}

PSeries ps_inv(const PSeries& a, size_t len, long p, int prec) {
  PSeries out(len, PadicNumber::zero(p, prec));
  PadicNumber a0 = a[0].inverse();
  out[0] = a0;
  for (size_t k = 1; k < len; ++k) {
    PadicNumber s = PadicNumber::zero(p, prec);
    for (size_t i = 1; i <= k && i < a.size(); ++i)
      if (!a[i].is_zero()) s = s + a[i] * out[k - i];
    out[k] = -(s * a0);
  }
  return out;
}

}  // namespace

QuadExtNumber formal_log(const KpPoint& P, const PadicNumber& a1, const PadicNumber& a2, const PadicNumber& a3,
                         const PadicNumber& a4, const PadicNumber& a6) {
  long p = a4.prime();
  QuadExtNumber z = -(P.x / P.y);
  if (z.is_zero() || z.valuation() < 1) throw PadicError("point is not in the formal group");
  int prec = z.precision() + 4;
  size_t len = static_cast<size_t>((z.precision() + 4) / z.valuation() + 4);
  auto zero = PadicNumber::zero(p, prec);
  auto one = PadicNumber::from_integer(p, 1, prec);
  // W = w / z^3 solves W = 1 + a1 z W + a2 z^2 W + a3 z^3 W^2 + a4 z^4 W^2 + a6 z^6 W^3
  PSeries W(len, zero);
  W[0] = one;
  for (size_t it = 0; it < len; ++it) {
    PSeries W2 = ps_mul(W, W, len, p, prec), W3 = ps_mul(W2, W, len, p, prec);
    PSeries next(len, zero);
    next[0] = one;
    for (size_t k = 0; k < len; ++k) {
      if (k + 1 < len) next[k + 1] = next[k + 1] + a1 * W[k];
      if (k + 2 < len) next[k + 2] = next[k + 2] + a2 * W[k];
      if (k + 3 < len) next[k + 3] = next[k + 3] + a3 * W2[k];
      if (k + 4 < len) next[k + 4] = next[k + 4] + a4 * W2[k];
      if (k + 6 < len) next[k + 6] = next[k + 6] + a6 * W3[k];
    }
    W = next;
  }
  PSeries V = ps_inv(W, len, p, prec);
  // omega / dz = (-2V + zV') / (-2V + a1 z V + a3 z^3)
  PSeries num(len, zero), den(len, zero);
  auto two = PadicNumber::from_integer(p, 2, prec);
  for (size_t k = 0; k < len; ++k) {
    num[k] = -(two * V[k]);
    if (k > 0) num[k] = num[k] + PadicNumber::from_integer(p, static_cast<long>(k), prec) * V[k];
    den[k] = den[k] - two * V[k];
    if (k + 1 < len) den[k + 1] = den[k + 1] + a1 * V[k];
  }
  if (len > 3) den[3] = den[3] + a3;
  PSeries omega = ps_mul(num, ps_inv(den, len, p, prec), len, p, prec);
  QuadExtNumber total = QuadExtNumber::zero(p, z.absolute_precision() + prec);
  QuadExtNumber zn = z;
  for (size_t k = 0; k < len; ++k) {
    if (!omega[k].is_zero()) {
      auto c = omega[k] / PadicNumber::from_integer(p, static_cast<long>(k + 1), prec);
      total = total + QuadExtNumber::from_padic(c) * zn;
    }
    zn = zn * z;
  }
  return total;
}

QuadExtNumber tate_formal_log(const TateCurve& Eq, const KpPoint& P) {
  long p = Eq.q.prime();
  auto zero = PadicNumber::zero(p, Eq.q.precision() + 4);
  return formal_log(P, PadicNumber::from_integer(p, 1, Eq.q.precision() + 4), zero, zero, Eq.a4, Eq.a6);
}

std::optional<mpq_class> rational_reconstruct(const mpz_class& x, const mpz_class& modulus, const mpz_class& bound) {
  mpz_class r0 = modulus, r1 = x % modulus;
  if (r1 < 0) r1 += modulus;
  mpz_class t0 = 0, t1 = 1;
  while (r1 > bound) {
    mpz_class q = r0 / r1;
    mpz_class r2 = r0 - q * r1, t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound) return std::nullopt;
  mpq_class out(r1, t1);
  out.canonicalize();
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), t1.get_mpz_t(), modulus.get_mpz_t());
  if (g != 1) return std::nullopt;
  return out;
}

namespace {

std::optional<mpq_class> rational_sqrt(const mpq_class& a) {
  if (a < 0) return std::nullopt;
  mpz_class n = a.get_num(), d = a.get_den();
  if (!is_square(n) || !is_square(d)) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return mpq_class(rn, rd);
}

std::optional<QuadRational> quad_sqrt(const QuadRational& z) {
  const mpz_class& D = z.D;
  if (z.b == 0) {
    if (auto r = rational_sqrt(z.a)) return QuadRational(*r, 0, D);
    if (auto r = rational_sqrt(z.a / D)) return QuadRational(0, *r, D);
    return std::nullopt;
  }
  auto n = rational_sqrt(z.a * z.a - D * z.b * z.b);
  if (!n) return std::nullopt;
  for (int sgn : {1, -1}) {
    mpq_class u2 = (z.a + sgn * *n) / 2;
    if (auto u = rational_sqrt(u2); u && *u != 0) {
      QuadRational c(*u, z.b / (2 * *u), D);
      if (c * c == z) return c;
    }
  }
  return std::nullopt;
}

std::optional<mpq_class> reconstruct_padic(const PadicNumber& x, const mpz_class& H, int precision) {
  if (x.is_zero() || x.valuation() >= x.absolute_precision()) return mpq_class(0);
  long p = x.prime();
  int v = x.valuation();
  int n = std::min(precision, x.precision());
  if (n <= 0) return std::nullopt;
  mpz_class mod = prime_power(p, n);
  mpz_class bound = H;
  if (v > 0) bound = H / prime_power(p, v);
  if (v < 0) bound = H;
  if (bound < 1) return std::nullopt;
  auto r = rational_reconstruct(x.unit() % mod, mod, bound);
  if (!r) return std::nullopt;
  mpq_class out = *r;
  if (v > 0) out *= mpq_class(prime_power(p, v));
  if (v < 0) out /= mpq_class(prime_power(p, -v));
  if (abs(out.get_num()) > H || out.get_den() > H) return std::nullopt;
  return out;
}

}  // namespace

std::optional<KPoint> lift_x(const CurveData& E, const QuadRational& x) {
  const mpz_class& D = x.D;
  auto c = [&](const mpz_class& n) { return QuadRational(mpq_class(n), D); };
  QuadRational h = c(E.a1) * x + c(E.a3);
  QuadRational f = x * x * x + c(E.a2) * x * x + c(E.a4) * x + c(E.a6);
  QuadRational disc = h * h + QuadRational(4, D) * f;
  auto s = quad_sqrt(disc);
  if (!s) return std::nullopt;
  KPoint P{x, (*s - h) / QuadRational(2, D)};
  QuadRational lhs = P.y * P.y + h * P.y;
  if (lhs != f) return std::nullopt;
  return P;
}

mpz_class naive_height(const QuadRational& x) {
  mpz_class den;
  mpz_lcm(den.get_mpz_t(), x.a.get_den().get_mpz_t(), x.b.get_den().get_mpz_t());
  mpz_class a = abs(mpz_class(x.a * den)), b = abs(mpz_class(x.b * den));
  return std::max({a, b, den});
}

std::optional<QuadRational> recognize(const QuadExtNumber& X, const mpz_class& D, const mpz_class& H, int precision) {
  long p = X.prime();
  auto sq = embed_quadratic(p, D, std::max(precision + 4, X.precision()));
  PadicNumber c = sq.b();
  PadicNumber x0 = X.a();
  PadicNumber bb = X.b();
  auto a = reconstruct_padic(x0, H, precision);
  if (!a) return std::nullopt;
  std::optional<mpq_class> b;
  if (bb.is_zero() || bb.valuation() >= bb.absolute_precision())
    b = mpq_class(0);
  else
    b = reconstruct_padic(bb / c, H, precision);
  if (!b) return std::nullopt;
  QuadRational out(*a, *b, D);
  if (naive_height(out) > H) return std::nullopt;
  return out;
}

std::optional<KPoint> recognize_point(const CurveData& E, const QuadExtNumber& X, const mpz_class& D,
                                      const mpz_class& H, int precision) {
  auto x = recognize(X, D, H, precision);
  if (!x) return std::nullopt;
  return lift_x(E, *x);
}

std::vector<KPoint> naive_points(const CurveData& E, const mpz_class& D, long H) {
  std::vector<KPoint> out;
  for (long c = 1; c <= H; ++c)
    for (long a = -H; a <= H; ++a)
      for (long b = -H; b <= H; ++b) {
        mpz_class g;
        mpz_class ma = a, mb = b, mc = c;
        mpz_gcd(g.get_mpz_t(), ma.get_mpz_t(), mb.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), mc.get_mpz_t());
        if (g != 1) continue;
        QuadRational x(mpq_class(a, c), mpq_class(b, c), D);
        x.a.canonicalize();
        x.b.canonicalize();
        if (auto P = lift_x(E, x)) out.push_back(*P);
      }
  return out;
}

KpModel KpModel::of(const CurveData& E, int precision) {
  long p = E.p;
  auto k = [&](const mpz_class& n) { return qconst(p, mpq_class(n), precision); };
  return KpModel{k(E.a1), k(E.a2), k(E.a3), k(E.a4), k(E.a6)};
}

KpPoint kp_add(const KpModel& W, const KpPoint& P, const KpPoint& Q) {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  long p = P.x.prime();
  int prec = std::max(P.x.precision(), Q.x.precision()) + 4;
  auto k = [&](long n) { return qconst(p, n, prec); };
  QuadExtNumber dx = Q.x - P.x;
  QuadExtNumber lambda;
  bool same_x = dx.is_zero() || dx.valuation() >= std::min(P.x.absolute_precision(), Q.x.absolute_precision());
  if (same_x) {
    QuadExtNumber s = P.y + Q.y + W.a1 * Q.x + W.a3;
    if (s.is_zero() || s.valuation() >= P.y.absolute_precision()) return KpPoint{};
    lambda = (k(3) * P.x * P.x + k(2) * W.a2 * P.x + W.a4 - W.a1 * P.y) / (k(2) * P.y + W.a1 * P.x + W.a3);
  } else {
    lambda = (Q.y - P.y) / dx;
  }
  QuadExtNumber nu = P.y - lambda * P.x;
  KpPoint R;
  R.infinity = false;
  R.x = lambda * lambda + W.a1 * lambda - W.a2 - P.x - Q.x;
  R.y = -(lambda + W.a1) * R.x - nu - W.a3;
  return R;
}

KpPoint kp_mul(const KpModel& W, long n, const KpPoint& P) {
  KpPoint B = P;
  if (n < 0) {
    n = -n;
    if (!B.infinity) B.y = -B.y - W.a1 * B.x - W.a3;
  }
  KpPoint R;
  while (n > 0) {
    if (n & 1) R = kp_add(W, R, B);
    n >>= 1;
    if (n > 0) B = kp_add(W, B, B);
  }
  return R;
}

KpPoint embed_point(const KPoint& P, long p, int precision) {
  auto sq = embed_quadratic(p, P.x.D, precision + 4);
  auto emb = [&](const QuadRational& z) {
    return qconst(p, z.a, precision) + qconst(p, z.b, precision) * sq;
  };
  return KpPoint{false, emb(P.x), emb(P.y)};
}

QuadExtNumber curve_formal_log(const CurveData& E, const KpPoint& P, int precision) {
  long p = E.p;
  auto c = [&](const mpz_class& n) {
    return n == 0 ? PadicNumber::zero(p, precision + 20) : PadicNumber::from_integer(p, n, precision);
  };
  return formal_log(P, c(E.a1), c(E.a2), c(E.a3), c(E.a4), c(E.a6));
}

namespace {

bool in_formal_group(const KpPoint& P) { return !P.infinity && P.x.valuation() < 0; }

std::vector<QuadExtNumber> roots_of_unity(long p, int precision) {
  std::vector<QuadExtNumber> out;
  for (long a = 0; a < p; ++a)
    for (long b = 0; b < p; ++b) {
      if (a == 0 && b == 0) continue;
      out.push_back(teichmuller(QuadExtNumber::from_parts(p, 0, a, b, precision)));
    }
  return out;
}

}  // namespace

Recognition recognize_stark_heegner(const CurveData& E, const StarkHeegnerPoint& P, const TatePeriod& T,
                                    const mpz_class& D, const std::vector<long>& bounds, long t_bound,
                                    long oracle_height) {
  long p = E.p;
  Recognition out;
  out.precision = std::max(0, std::min(P.agreement, P.u_plus.precision()));
  TateCurve Eq = tate_curve(T.q);
  auto iso = tate_isomorphism(Eq, E, T.q.precision());
  std::vector<long> mults;
  for (long m = 1; m <= t_bound; ++m)
    if (t_bound % m == 0) mults.push_back(m);
  auto zetas = roots_of_unity(p, P.u_plus.precision());
  for (long H : bounds) {
    out.height_bound = H;
    for (long m : mults)
      for (int comp = 0; comp < 2; ++comp) {
        QuadExtNumber u = (comp == 0 ? P.u_plus : P.u_minus).pow(m);
        for (const auto& z : zetas) {
          KpPoint Q = to_curve(tate_point(Eq, u * z), Eq, iso, E);
          if (Q.infinity) continue;
          if (auto R = recognize_point(E, Q.x, D, H, out.precision)) {
            out.recognized = true;
            out.point = *R;
            out.multiplier = m;
            out.component = comp;
            break;
          }
        }
        if (out.recognized) break;
      }
    if (out.recognized) break;
  }

  out.oracle = naive_points(E, D, oracle_height);
  int prec = P.u_plus.precision();
  KpModel W = KpModel::of(E, prec + 6);
  long n0 = (p * p - 1) * valuation_of(mpz_class(abs(E.discriminant())), p) * 2;
  KpPoint tp = kp_mul(W, n0, to_curve(tate_point(Eq, P.u_plus), Eq, iso, E));
  if (!in_formal_group(tp)) return out;
  QuadExtNumber lp = curve_formal_log(E, tp, prec);
  for (const auto& O : out.oracle) {
    KpPoint K = kp_mul(W, n0, embed_point(O, p, prec + 6));
    if (!in_formal_group(K)) continue;
    QuadExtNumber l0 = curve_formal_log(E, K, prec);
    if (l0.is_zero() || l0.valuation() >= l0.absolute_precision()) continue;
    QuadExtNumber ratio = lp / l0;
    if (!ratio.is_rational()) continue;
    PadicNumber r = ratio.a();
    int digits = std::min(out.precision, r.precision());
    if (r.valuation() < 0 || digits <= 0) continue;
    mpz_class mod = prime_power(p, digits);
    mpz_class bound;
    mpz_sqrt(bound.get_mpz_t(), mpz_class(mod / 2).get_mpz_t());
    if (auto k = rational_reconstruct(r.residue(digits), mod, bound)) out.log_ratio = *k;
    break;
  }
  return out;
}

}  // namespace mockplectic
