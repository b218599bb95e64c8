#include "mockplectic/cmheegner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace mockplectic {

namespace {

using LD = long double;
using CLD = std::complex<LD>;

const LD kPi = 3.141592653589793238462643383279502884L;

LD to_ld(const mpq_class& q) {
  double hi = q.get_d();
  mpq_class lo = q - mpq_class(hi);
  return static_cast<LD>(hi) + static_cast<LD>(lo.get_d());
}

struct Kahan {
  CLD sum{0, 0}, carry{0, 0};
  void add(const CLD& x) {
    CLD y = x - carry;
    CLD t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

mpz_class floor_q(const mpq_class& q) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

int vq(const mpq_class& q, long p) { return q == 0 ? 1 << 20 : valuation_of(q, p); }

bool fundamental(const mpz_class& D) {
  auto squarefree = [](mpz_class n) {
    n = abs(n);
    for (long q = 2; mpz_class(q) * q <= n; ++q)
      if (n % (q * q) == 0) return false;
    return true;
  };
  mpz_class m = D % 4;
  if (m < 0) m += 4;
  if (m == 1) return squarefree(D);
  if (m != 0) return false;
  mpz_class d4 = D / 4;
  mpz_class r = d4 % 4;
  if (r < 0) r += 4;
  return (r == 2 || r == 3) && squarefree(d4);
}

LD agm(LD a, LD b, LD tol, int& steps) {
  steps = 0;
  while (std::fabs(a - b) > tol * std::fabs(a) && steps < 200) {
    LD an = (a + b) / 2;
    b = std::sqrt(a * b);
    a = an;
    ++steps;
  }
  return a;
}

LD cubic_value(const CurveData& E, LD x) {
  LD b2 = to_ld(E.b2()), b4 = to_ld(E.b4()), b6 = to_ld(E.b6());
  return ((4 * x + b2) * x + 2 * b4) * x + b6;
}

LD polish(const CurveData& E, LD x) {
  LD b2 = to_ld(E.b2()), b4 = to_ld(E.b4());
  for (int i = 0; i < 8; ++i) {
    LD d = (12 * x + 2 * b2) * x + 2 * b4;
    if (d == 0) break;
    x -= cubic_value(E, x) / d;
  }
  return x;
}

Complex to_c(const CLD& z) { return Complex(static_cast<double>(z.real()), static_cast<double>(z.imag())); }

void gauss_reduce(CLD& w1, CLD& w2) {
  for (int it = 0; it < 100; ++it) {
    if (std::abs(w2) < std::abs(w1)) std::swap(w1, w2);
    LD m = std::round((w2 / w1).real());
    if (m == 0) break;
    w2 -= m * w1;
  }
  if ((w2 / w1).imag() < 0) w2 = -w2;
}

template <class F>
void parallel_for(size_t n, int threads, F&& f) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (threads == 1) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (size_t i = static_cast<size_t>(t); i < n; i += static_cast<size_t>(threads)) f(i);
      } catch (...) {
        errors[static_cast<size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int vertex_distance(const Vertex& v) {
  int vc = v.center_num == 0 ? 1 << 20 : -v.center_den_exp;
  int kb = std::min({0, v.level, vc});
  return v.level - 2 * kb;
}

QuadExtNumber lift_q(long p, const mpq_class& q, int prec) {
  if (q == 0) return QuadExtNumber::zero(p, prec);
  return QuadExtNumber::from_padic(PadicNumber::from_rational(p, q, prec));
}

}  // namespace

Complex HPoint::value() const {
  return Complex(x.get_d(), y.get_d() * std::sqrt(d.get_d()));
}

HPoint HPoint::act(const mpq_class& a, const mpq_class& b, const mpq_class& c, const mpq_class& dd) const {
  mpq_class det = a * dd - b * c;
  if (det <= 0) throw std::invalid_argument("matrix must have positive determinant");
  mpq_class u = c * x + dd;
  mpq_class den = u * u + c * c * y * y * d;
  HPoint out;
  out.d = d;
  out.x = ((a * x + b) * u + a * c * y * y * d) / den;
  out.y = y * det / den;
  out.x.canonicalize();
  out.y.canonicalize();
  return out;
}

ReducedPoint reduce_sl2z(const HPoint& z) {
  ReducedPoint r{z, 1, 0, 0, 1};
  for (int it = 0; it < 100000; ++it) {
    mpz_class n = floor_q(r.w.x + mpq_class(1, 2));
    if (n != 0) {
      r.w.x -= n;
      r.a -= n * r.c;
      r.b -= n * r.d;
    }
    mpq_class N = r.w.x * r.w.x + r.w.y * r.w.y * r.w.d;
    if (N >= 1) return r;
    r.w.x = -r.w.x / N;
    r.w.y = r.w.y / N;
    r.w.x.canonicalize();
    r.w.y.canonicalize();
    mpz_class a = r.a, b = r.b;
    r.a = -r.c;
    r.b = -r.d;
    r.c = a;
    r.d = b;
  }
  throw std::runtime_error("fundamental-domain reduction did not terminate");
}

CMPoint CMPoint::make(const mpz_class& A, const mpz_class& B, const mpz_class& C, long p, int precision) {
  CMPoint t;
  t.A = A;
  t.B = B;
  t.C = C;
  t.p = p;
  t.D = B * B - 4 * A * C;
  if (t.D >= 0) throw std::invalid_argument("CM point needs D < 0");
  if (A <= 0) throw std::invalid_argument("CM form needs A > 0");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
  mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), C.get_mpz_t());
  if (g != 1) throw std::invalid_argument("CM form must be primitive");
  if (!fundamental(t.D)) throw std::invalid_argument("discriminant is not fundamental");
  static const long class_one[] = {-3, -4, -7, -8, -11, -19, -43, -67, -163};
  if (std::find(std::begin(class_one), std::end(class_one), t.D.get_si()) == std::end(class_one) ||
      !t.D.fits_slong_p())
    throw std::invalid_argument("class number of D is not one");
  if (p == 2 || !is_prime(p)) throw std::invalid_argument("p must be an odd prime");
  mpz_class pp = p, Dm = t.D % pp;
  if (Dm < 0) Dm += pp;
  if (Dm == 0 || mpz_legendre(Dm.get_mpz_t(), pp.get_mpz_t()) != -1)
    throw std::invalid_argument("p must be inert in K");
  if (A % p == 0) throw std::invalid_argument("p must not divide A");
  t.tau_inf.d = -t.D;
  t.tau_inf.x = mpq_class(-B, 2 * A);
  t.tau_inf.y = mpq_class(1, 2 * A);
  t.tau_inf.x.canonicalize();
  t.tau_inf.y.canonicalize();
  auto sq = embed_quadratic(p, t.D, precision + 4);
  t.tau_p = ((sq - lift_q(p, mpq_class(B), precision + 4)) / lift_q(p, mpq_class(2 * A), precision + 4))
                .with_precision(precision);
  return t;
}

CMPoint CMPoint::principal(const mpz_class& D, long p, int precision) {
  mpz_class m = D % 2;
  mpz_class b = m == 0 ? 0 : 1;
  return make(1, b, (b * b - D) / 4, p, precision);
}

double ComplexLattice::distance(const Complex& z) const {
  double det = omega1.real() * omega2.imag() - omega1.imag() * omega2.real();
  double u = (z.real() * omega2.imag() - z.imag() * omega2.real()) / det;
  double v = (omega1.real() * z.imag() - omega1.imag() * z.real()) / det;
  double best = std::abs(z);
  for (double du = -1; du <= 1; ++du)
    for (double dv = -1; dv <= 1; ++dv) {
      Complex w = (std::round(u) + du) * omega1 + (std::round(v) + dv) * omega2;
      best = std::min(best, std::abs(z - w));
    }
  return best;
}

ComplexLattice complex_lattice(const CurveData& E, double tolerance) {
  LD tol = std::max<LD>(tolerance, 4 * std::numeric_limits<LD>::epsilon());
  LD c4 = to_ld(E.c4()), c6 = to_ld(E.c6()), b2 = to_ld(E.b2()), b4 = to_ld(E.b4());
  LD P = -c4 / 48, Q = -c6 / 864;
  ComplexLattice L;
  CLD w1, w2;
  int s1 = 0, s2 = 0;
  if (E.discriminant() > 0) {
    LD r = 2 * std::sqrt(-P / 3);
    LD phi = std::acos(std::clamp<LD>((3 * Q / (2 * P)) * std::sqrt(-3 / P), -1, 1)) / 3;
    std::vector<LD> e;
    for (int k = 0; k < 3; ++k) e.push_back(polish(E, r * std::cos(phi - 2 * kPi * k / 3) - b2 / 12));
    std::sort(e.begin(), e.end(), std::greater<LD>());
    LD m1 = agm(std::sqrt(e[0] - e[2]), std::sqrt(e[0] - e[1]), tol, s1);
    LD m2 = agm(std::sqrt(e[0] - e[2]), std::sqrt(e[1] - e[2]), tol, s2);
    w1 = CLD(kPi / m1, 0);
    w2 = CLD(0, kPi / m2);
    L.real_period = static_cast<double>(kPi / m1);
    L.imag_period = Complex(0, static_cast<double>(kPi / m2));
  } else {
    LD s = std::sqrt(Q * Q / 4 + P * P * P / 27);
    LD X = std::cbrt(-Q / 2 + s) + std::cbrt(-Q / 2 - s);
    LD e1 = polish(E, X - b2 / 12);
    LD a = 3 * e1 + b2 / 4;
    LD b = std::sqrt(3 * e1 * e1 + b2 / 2 * e1 + b4 / 2);
    LD m1 = agm(2 * std::sqrt(b), std::sqrt(2 * b + a), tol, s1);
    LD m2 = agm(2 * std::sqrt(b), std::sqrt(2 * b - a), tol, s2);
    w1 = CLD(2 * kPi / m1, 0);
    w2 = CLD(-kPi / m1, kPi / m2);
    L.real_period = static_cast<double>(2 * kPi / m1);
    L.imag_period = Complex(0, static_cast<double>(2 * kPi / m2));
  }
  L.agm_steps = std::max(s1, s2);
  gauss_reduce(w1, w2);
  L.omega1 = to_c(w1);
  L.omega2 = to_c(w2);
  return L;
}

std::pair<double, double> lattice_invariants(const ComplexLattice& L) {
  CLD w1(L.omega1.real(), L.omega1.imag()), w2(L.omega2.real(), L.omega2.imag());
  CLD tau = w2 / w1;
  CLD q = std::exp(CLD(0, 2 * kPi) * tau);
  Kahan e4, e6;
  e4.add(1);
  e6.add(1);
  CLD qn = 1;
  for (long n = 1; n <= 80; ++n) {
    qn *= q;
    LD s3 = 0, s5 = 0;
    for (long d = 1; d <= n; ++d)
      if (n % d == 0) {
        s3 += static_cast<LD>(d) * d * d;
        s5 += static_cast<LD>(d) * d * d * d * d;
      }
    e4.add(240 * s3 * qn);
    e6.add(-504 * s5 * qn);
  }
  CLD f = CLD(2 * kPi, 0) / w1;
  CLD f2 = f * f;
  CLD c4 = f2 * f2 * e4.sum, c6 = f2 * f2 * f2 * e6.sum;
  return {static_cast<double>(c4.real()), static_cast<double>(c6.real())};
}

CMContext CMContext::make(const CurveData& E, int threads, long terms) {
  CMContext ctx;
  ctx.E = E;
  ctx.threads = threads;
  ctx.lattice = complex_lattice(E);
  ctx.fricke_sign = -E.ap;
  ctx.torsion = E.torsion;
  LD q = std::exp(-2 * kPi * std::sqrt(3.0L) / (2 * E.p));
  long need = static_cast<long>(std::ceil(std::log(1e-16L * (1 - q) / 2) / std::log(q))) + 2;
  ctx.an = fourier_coefficients(E, std::max(terms, need));
  ctx.phi_zero = static_cast<double>(1 - ctx.fricke_sign) *
                 ctx.phi(Complex(0, 1 / std::sqrt(static_cast<double>(E.p))));
  return ctx;
}

Complex CMContext::phi(const Complex& w, long M, double* error) const {
  CLD z(w.real(), w.imag());
  CLD q = std::exp(CLD(0, 2 * kPi) * z);
  LD aq = std::abs(q);
  if (aq >= 1) throw std::invalid_argument("phi needs Im w > 0");
  long cap = static_cast<long>(an.size()) - 1;
  if (M <= 0) {
    M = static_cast<long>(std::ceil(std::log(1e-16L * (1 - aq) / 2) / std::log(aq)));
    M = std::max(1L, M);
  }
  M = std::min(M, cap);
  Kahan s;
  CLD qn = 1;
  for (long n = 1; n <= M; ++n) {
    qn *= q;
    if (an[static_cast<size_t>(n)] != 0) s.add(qn * static_cast<LD>(an[static_cast<size_t>(n)]) / static_cast<LD>(n));
  }
  if (error) *error = static_cast<double>(2 * std::pow(aq, static_cast<LD>(M + 1)) / (1 - aq));
  return to_c(s.sum);
}

EdgeValue edge_value(const CMContext& ctx, const HPoint& tau, const Ball& edge) {
  long p = ctx.E.p;
  EdgeValue out;
  out.edge = edge;
  auto red = reduce_edge(OrientedEdge{edge});
  out.gamma = red.gamma;
  out.orientation = red.orientation;
  HPoint w = tau.act(red.gamma);
  ReducedPoint R = reduce_sl2z(w);
  mpz_class c = -R.c, pp = p;
  mpz_class cm = c % pp;
  if (cm < 0) cm += pp;
  Complex v;
  double err = 0;
  if (cm == 0) {
    v = ctx.phi(R.w.value(), 0, &err);
    out.terms = std::min<long>(static_cast<long>(ctx.an.size()) - 1,
                               static_cast<long>(std::ceil(std::log(1e-16) / (-2 * M_PI * R.w.value().imag()))));
  } else {
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), cm.get_mpz_t(), pp.get_mpz_t());
    mpz_class j = (R.a * inv) % pp;
    if (j < 0) j += pp;
    HPoint z = R.w;
    z.x = (z.x + j) / p;
    z.y = z.y / p;
    z.x.canonicalize();
    z.y.canonicalize();
    v = static_cast<double>(ctx.fricke_sign) * (ctx.phi(z.value(), 0, &err) - ctx.phi_zero);
    out.fricke = true;
    out.terms = std::min<long>(static_cast<long>(ctx.an.size()) - 1,
                               static_cast<long>(std::ceil(std::log(1e-16) / (-2 * M_PI * z.value().imag()))));
  }
  double t = static_cast<double>(ctx.torsion);
  out.value = static_cast<double>(out.orientation) * t * v;
  out.error_bound = t * err;
  if (out.error_bound > 1e-8 * ctx.lattice.scale())
    throw std::runtime_error("edge value tolerance unattainable with the available q-expansion terms");
  return out;
}

std::vector<EdgeValue> edge_values(const CMContext& ctx, const HPoint& tau, const std::vector<Ball>& edges) {
  std::vector<EdgeValue> out(edges.size());
  parallel_for(edges.size(), ctx.threads, [&](size_t i) { out[i] = edge_value(ctx, tau, edges[i]); });
  return out;
}

double harmonicity_defect(const CMContext& ctx, const HPoint& tau, int radius) {
  long p = ctx.E.p;
  std::vector<Vertex> verts{Vertex::standard(p)};
  for (int k = 1; k <= radius; ++k)
    for (const auto& b : covering(p, k)) verts.push_back(OrientedEdge{b}.target());
  std::vector<Ball> balls;
  for (const auto& v : verts)
    for (const auto& e : edges_at(v)) balls.push_back(e.ball);
  auto vals = edge_values(ctx, tau, balls);
  double worst = 0;
  size_t k = 0;
  for (size_t i = 0; i < verts.size(); ++i) {
    Kahan s;
    for (long j = 0; j <= p; ++j, ++k) s.add(CLD(vals[k].value.real(), vals[k].value.imag()));
    worst = std::max(worst, ctx.lattice.distance(to_c(s.sum)));
  }
  return worst;
}

TorusKey torus_key(const QuadExtNumber& x, int n) {
  auto res = [&](const PadicNumber& c) -> mpz_class {
    if (c.is_zero()) return 0;
    if (c.valuation() < 0) throw std::invalid_argument("torus key of a non-integral element");
    return c.residue(n);
  };
  if (x.is_zero()) return {0, 0};
  return {res(x.a()), res(x.b())};
}

QuadExtNumber homeo_A(const CMPoint& tau, const Cusp& t, int precision) {
  long p = tau.p;
  if (t.is_infinity()) return QuadExtNumber::from_padic(PadicNumber::from_integer(p, 1, precision));
  auto T = lift_q(p, t.value(), precision + 4);
  auto tp = tau.tau_p.with_precision(precision + 4);
  return ((T - tp) / (T - tp.conjugate())).with_precision(precision);
}

Ball reference_edge(long p, int n) { return Ball::complement_of(p, 0, 1 - n); }

TorusLabel torus_label(const CMPoint& tau, const Ball& edge, int n) {
  OrientedEdge e{edge};
  if (vertex_distance(e.target()) != n || vertex_distance(e.source()) != n - 1)
    throw std::invalid_argument("edge is not at distance n from the standard vertex");
  TorusLabel out;
  out.alpha = homeo_A(tau, edge.sample(), n + 6);
  out.key = torus_key(out.alpha, n);
  return out;
}

Ball RationalMatrix::act(const Ball& ball) const {
  if (ball.coaffine) return act(ball.complement()).complement();
  long p = ball.p;
  int vdet = valuation_of(mpq_class(a * d - b * c), p);
  mpq_class x0 = ball.center();
  int m = ball.level;
  if (c == 0) return Ball::affine(p, (a * x0 + b) / d, m + valuation_of(a, p) - valuation_of(d, p));
  mpq_class pole = -d / c;
  if (pole == x0 || valuation_of(mpq_class(pole - x0), p) >= m)
    return Ball::complement_of(p, a / c, 1 - m - 2 * valuation_of(c, p) + vdet);
  mpq_class w = c * x0 + d;
  return Ball::affine(p, (a * x0 + b) / w, m + vdet - 2 * valuation_of(w, p));
}

RationalMatrix torus_matrix(const CMPoint& tau, const mpq_class& x, const mpq_class& y) {
  mpq_class A(tau.A), B(tau.B), C(tau.C);
  RationalMatrix M{x - y * B / A, -y * C / A, y, x};
  if (M.a * M.d - M.b * M.c == 0) throw std::invalid_argument("torus element must be nonzero");
  return M;
}

QuadExtNumber torus_character(const CMPoint& tau, const mpq_class& x, const mpq_class& y, int precision) {
  long p = tau.p;
  auto tp = tau.tau_p.with_precision(precision + 4);
  auto beta = lift_q(p, x, precision + 4) + lift_q(p, y, precision + 4) * tp;
  auto bbar = lift_q(p, x, precision + 4) + lift_q(p, y, precision + 4) * tp.conjugate();
  return (bbar / beta).with_precision(precision);
}

RationalMatrix torus_element_for(const CMPoint& tau, const QuadExtNumber& alpha, int n) {
  long p = tau.p;
  auto minus_one = QuadExtNumber::from_padic(PadicNumber::from_integer(p, -1, n + 4));
  if (torus_key(alpha, n) == torus_key(minus_one, n)) return torus_matrix(tau, mpq_class(tau.B), mpq_class(2 * tau.A));
  int prec = n + 8;
  auto one = QuadExtNumber::from_padic(PadicNumber::from_integer(p, 1, prec));
  auto beta = one + alpha.with_precision(prec).conjugate();
  auto sq = embed_quadratic(p, tau.D, prec);
  PadicNumber cs = sq.b();
  PadicNumber u = beta.a(), v = beta.b();
  PadicNumber x = u + v * PadicNumber::from_integer(p, tau.B, prec) / cs;
  PadicNumber y = v * PadicNumber::from_integer(p, 2 * tau.A, prec) / cs;
  auto approx = [&](const PadicNumber& z) -> mpq_class {
    if (z.is_zero()) return 0;
    return mpq_class(z.residue(prec - 2));
  };
  return torus_matrix(tau, approx(x), approx(y));
}

PushforwardReport pushforward_check(const CMPoint& tau, int n) {
  long p = tau.p;
  PushforwardReport rep;
  // A as the matrix [[1, -tau], [1, -taubar]]
  auto tp = tau.tau_p;
  auto tb = tp.conjugate();
  auto one = QuadExtNumber::from_padic(PadicNumber::from_integer(p, 1, tp.precision()));
  rep.fixed_points = (one * tp - tp).is_zero() && (one * tb - tb).is_zero() && !(tb - tp).is_zero() &&
                     homeo_A(tau, Cusp::infinity(), n + 4) == one.with_precision(n + 4);

  auto balls = covering(p, n);
  rep.edges = static_cast<long>(balls.size());
  bool inside = true;
  std::set<TorusKey> keys;
  for (const auto& b : balls) {
    int bound;
    if (!b.coaffine) {
      int m = std::min(0, vq(b.center(), p));
      bound = b.level > m ? b.level - 2 * m : -1;
    } else {
      int m = std::min(0, vq(b.center(), p));
      int sup = (b.level - 1 >= m) ? 0 : b.level - 1;
      bound = -sup;
    }
    if (bound < n) inside = false;
    keys.insert(torus_label(tau, b, n).key);
  }
  rep.images_in_cosets = inside;
  mpz_class group = mpz_class(p + 1) * prime_power(p, n - 1);
  rep.bijective = static_cast<long>(keys.size()) == rep.edges && mpz_class(rep.edges) == group;
  bool refines = true;
  mpz_class mod = prime_power(p, n);
  for (const auto& b : balls) {
    auto parent = torus_label(tau, b, n).key;
    for (const auto& c : refine(b)) {
      auto k = torus_label(tau, c, n + 1).key;
      if (mpz_class(k.first % mod) != parent.first || mpz_class(k.second % mod) != parent.second) refines = false;
    }
  }
  rep.refines = refines;
  rep.ok = rep.fixed_points && rep.images_in_cosets && rep.bijective && rep.refines;
  return rep;
}

namespace {

PlecticApprox assemble(const CMContext& ctx, const CMPoint& tau, int n, bool logs) {
  long p = ctx.E.p;
  PlecticApprox Q;
  Q.level = n;
  Q.p = p;
  auto balls = covering(p, n);
  auto vals = edge_values(ctx, tau.tau_inf, balls);
  Q.terms.resize(balls.size());
  parallel_for(balls.size(), ctx.threads, [&](size_t i) {
    PlecticTerm& t = Q.terms[i];
    t.edge = balls[i];
    t.value = vals[i].value;
    auto lab = torus_label(tau, balls[i], n);
    t.alpha = lab.alpha;
    t.alpha_key = lab.key;
    if (logs) {
      t.coefficient = log_principal(angle(lab.alpha));
      t.coefficient_key = torus_key(t.coefficient, n);
    } else {
      t.coefficient = lab.alpha;
      t.coefficient_key = lab.key;
    }
  });
  Kahan s;
  for (const auto& t : Q.terms) s.add(CLD(t.value.real(), t.value.imag()));
  Q.shadow = to_c(s.sum);
  Q.shadow_distance = ctx.lattice.distance(Q.shadow);
  return Q;
}

}  // namespace

PlecticApprox plectic_invariant(const CMContext& ctx, const CMPoint& tau, int n) { return assemble(ctx, tau, n, true); }

PlecticApprox kolyvagin_derivative(const CMContext& ctx, const CMPoint& tau, int n) {
  return assemble(ctx, tau, n, false);
}

std::map<TorusKey, Complex> fiber_sums(const PlecticApprox& Q, int m) {
  std::map<TorusKey, Kahan> acc;
  for (const auto& t : Q.terms) acc[torus_key(t.coefficient, m)].add(CLD(t.value.real(), t.value.imag()));
  std::map<TorusKey, Complex> out;
  for (auto& [k, s] : acc) out[k] = to_c(s.sum);
  return out;
}

double level_defect(const PlecticApprox& Q, const PlecticApprox& R, int m, const ComplexLattice& L) {
  auto a = fiber_sums(Q, m), b = fiber_sums(R, m);
  for (const auto& [k, v] : b) a[k] -= v;
  double worst = 0;
  for (const auto& [k, v] : a) worst = std::max(worst, L.distance(v));
  return worst;
}

RotationReport galois_rotation(const PlecticApprox& Q, const CMPoint& tau, const mpq_class& x, const mpq_class& y,
                               const ComplexLattice& L) {
  int n = Q.level;
  RotationReport rep;
  rep.shadow_distance = L.distance(Q.shadow);
  auto M = torus_matrix(tau, x, y);
  auto chi = torus_character(tau, x, y, n + 6);
  auto shift = log_principal(angle(chi));
  std::map<Ball, size_t> index;
  for (size_t i = 0; i < Q.terms.size(); ++i) index[Q.terms[i].edge] = i;
  std::set<size_t> hit;
  bool ok = true;
  for (const auto& t : Q.terms) {
    auto it = index.find(M.act(t.edge));
    if (it == index.end()) {
      ok = false;
      break;
    }
    hit.insert(it->second);
    const auto& u = Q.terms[it->second];
    if (torus_key(u.alpha - chi * t.alpha, n) != TorusKey{0, 0}) ok = false;
    if (torus_key(u.coefficient - t.coefficient - shift, n) != TorusKey{0, 0}) ok = false;
  }
  rep.permutes = ok && hit.size() == Q.terms.size();
  return rep;
}

double trace_compat_check(const CMContext& ctx, const CMPoint& tau, int n, const TraceOptions& opts) {
  long p = ctx.E.p;
  if (n < 1) throw std::invalid_argument("trace compatibility needs n >= 1");
  auto parents = covering(p, n);
  std::vector<Ball> children;
  for (const auto& b : parents)
    for (auto& c : refine(b)) children.push_back(std::move(c));
  auto pv = edge_values(ctx, tau.tau_inf, parents);
  auto cv = edge_values(ctx, tau.tau_inf, children);
  double ap = static_cast<double>(ctx.E.ap);
  double tw_n = opts.twist ? std::pow(ap, n) : 1.0;
  double tw_n1 = opts.twist ? std::pow(ap, n + 1) : 1.0;
  double worst = 0;
  for (size_t i = 0; i < parents.size(); ++i) {
    Kahan s;
    for (size_t j = 0; j < static_cast<size_t>(p); ++j) {
      Complex v = tw_n1 * cv[i * static_cast<size_t>(p) + j].value;
      s.add(CLD(v.real(), v.imag()));
    }
    Complex y = tw_n * pv[i].value;
    Complex r = opts.scale * (to_c(s.sum) - ap * y);
    worst = std::max(worst, ctx.lattice.distance(r));
  }
  return worst;
}

}  // namespace mockplectic
