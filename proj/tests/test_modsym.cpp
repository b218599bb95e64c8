#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mockplectic/modsym.hpp"
#include "mockplectic/weierstrass.hpp"

#include <random>

using namespace mockplectic;

namespace {

const std::vector<long> kCurve11{0, -1, 1, -10, -20};

struct Fixture {
  CurveData E = CurveData::make(kCurve11, 11);
  ManinBasis B = build_basis(11);
  EigenSymbol M = eigen_symbol(E, B);
};

const Fixture& fx() {
  static Fixture f;
  return f;
}

Cusp random_cusp(std::mt19937_64& rng) {
  long num = static_cast<long>(rng() % 20001) - 10000;
  long den = static_cast<long>(rng() % 5000) + 1;
  return Cusp::make(num, den);
}

std::pair<std::array<long, 4>, bool> random_gamma0(std::mt19937_64& rng, long p) {
  for (;;) {
    long c = p * (static_cast<long>(rng() % 21) - 10);
    long d = static_cast<long>(rng() % 41) - 20;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), mpz_class(c).get_mpz_t(), mpz_class(d).get_mpz_t());
    if (g != 1) continue;
    mpz_class a, b, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), mpz_class(d).get_mpz_t(), mpz_class(c).get_mpz_t());
    // a d - b c = 1 with a = s, b = -t
    return {{s.get_si(), -t.get_si(), c, d}, true};
  }
}

Cusp act(const std::array<long, 4>& g, const Cusp& x) {
  if (x.is_infinity()) return g[2] == 0 ? x : Cusp::make(g[0], g[2]);
  return Cusp::make(g[0] * x.num + g[1] * x.den, g[2] * x.num + g[3] * x.den);
}

}  // namespace

TEST_CASE("curve invariants for conductor 11") {
  const auto& E = fx().E;
  CHECK(E.discriminant() == -161051);
  CHECK(E.c4() == 496);
  CHECK(E.ap == 1);
  CHECK(valuation_of(mpq_class(E.j), 11) == -5);
  CHECK(ap_from_curve(E, 2) == -2);
  CHECK(ap_from_curve(E, 3) == -1);
  CHECK(ap_from_curve(E, 11) == E.ap);
  for (long l : primes_up_to(100)) {
    if (l == 11) continue;
    long a = ap_from_curve(E, l);
    CHECK(a * a <= 4 * l);
  }
}

TEST_CASE("curve validation") {
  CHECK_THROWS_AS(CurveData::make({0, -1, 1, -10}, 11), CurveError);
  CHECK_THROWS_AS(CurveData::make(kCurve11, 13), CurveError);
  CHECK_THROWS_AS(CurveData::make({0, 0, 0, 0, 0}, 11), CurveError);
  try {
    CurveData::make({0, 0, 0, 0, 0}, 11);
  } catch (const CurveError& e) {
    CHECK(e.code() == "E_CURVE");
  }
  auto E37 = CurveData::make({0, 0, 1, -1, 0}, 37);
  CHECK(E37.ap == ap_from_curve(E37, 37));
  auto E17 = CurveData::make({1, -1, 1, -1, -14}, 17);
  CHECK(E17.ap == ap_from_curve(E17, 17));
}

TEST_CASE("torsion") {
  const auto& E = fx().E;
  CHECK(E.torsion == 5);
  CHECK(torsion_bound(E) % E.torsion == 0);
  WCurve<mpq_class> W{E.a1, E.a2, E.a3, E.a4, E.a6};
  auto P = WPoint<mpq_class>::affine(5, 5);
  CHECK(W.contains(P));
  CHECK(W.mul(E.torsion, P).infinity);
  CHECK_FALSE(W.mul(1, P).infinity);
}

TEST_CASE("Fourier coefficients are multiplicative") {
  auto a = fourier_coefficients(fx().E, 60);
  CHECK(a[1] == 1);
  CHECK(a[2] == -2);
  CHECK(a[4] == 2);
  CHECK(a[6] == 2);
  CHECK(a[11] == 1);
  CHECK(a[22] == -2);
}

TEST_CASE("Manin relations") {
  const auto& B = fx().B;
  CHECK(B.solutions.size() == 3);  // 2g + 1 for X_0(11)
  for (const auto& phi : B.solutions) {
    for (long i = 0; i < B.size(); ++i) {
      auto [c, d] = B.symbol(i);
      CHECK(phi[i] + phi[B.index(-d, c)] == 0);
      CHECK(phi[i] + phi[B.index(d, -c - d)] + phi[B.index(-c - d, c)] == 0);
    }
  }
}

TEST_CASE("Hecke equivariance of the eigen-symbol") {
  const auto& M = fx().M;
  std::vector<mpq_class> plus(M.plus.begin(), M.plus.end()), minus(M.minus.begin(), M.minus.end());
  for (long l : {2L, 3L, 5L, 7L, 13L, 17L, 19L}) {
    long al = ap_from_curve(fx().E, l);
    auto tp = hecke_apply(11, l, plus), tm = hecke_apply(11, l, minus);
    for (size_t i = 0; i < plus.size(); ++i) {
      CHECK(tp[i] == al * plus[i]);
      CHECK(tm[i] == al * minus[i]);
    }
  }
  auto up = hecke_apply(11, 11, plus);
  for (size_t i = 0; i < plus.size(); ++i) CHECK(up[i] == M.ap * plus[i]);
  auto sp = star_apply(11, plus), sm = star_apply(11, minus);
  for (size_t i = 0; i < plus.size(); ++i) {
    CHECK(sp[i] == plus[i]);
    CHECK(sm[i] == -minus[i]);
  }
  mpz_class gp = 0, gm = 0;
  for (size_t i = 0; i < plus.size(); ++i) {
    mpz_gcd(gp.get_mpz_t(), gp.get_mpz_t(), mpz_class(M.plus[i]).get_mpz_t());
    mpz_gcd(gm.get_mpz_t(), gm.get_mpz_t(), mpz_class(M.minus[i]).get_mpz_t());
  }
  CHECK(gp == 1);
  CHECK(gm == 1);
  CHECK(M.eval(Cusp::rational(0), Cusp::infinity()).plus >= 0);
  CHECK(M.eval(Cusp::rational(0), Cusp::infinity()).minus == 0);
}

TEST_CASE("symbol evaluation") {
  const auto& M = fx().M;
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    Cusp r = random_cusp(rng), s = random_cusp(rng), t = random_cusp(rng);
    CHECK(M.eval(r, r) == SymbolValue{0, 0});
    CHECK(M.eval(r, s) + M.eval(s, t) == M.eval(r, t));
    auto [g, ok] = random_gamma0(rng, 11);
    CHECK(M.eval(act(g, r), act(g, s)) == M.eval(r, s));
    auto cf = manin_path(11, s), ceil = manin_path_ceiling(11, s);
    long dp = 0, dm = 0;
    for (size_t k = 0; k < cf.size(); ++k) {
      dp += (cf[k] - ceil[k]) * M.plus[k];
      dm += (cf[k] - ceil[k]) * M.minus[k];
    }
    CHECK(dp == 0);
    CHECK(dm == 0);
    long fp, fm;
    M.eval_fast(r.num.get_si(), r.den.get_si(), s.num.get_si(), s.den.get_si(), fp, fm);
    auto v = M.eval(r, s);
    CHECK(v.plus == fp);
    CHECK(v.minus == fm);
  }
}

TEST_CASE("a_p = -1 eigen-symbols") {
  for (auto [coeffs, p] : std::vector<std::pair<std::vector<long>, long>>{{{0, 0, 1, -1, 0}, 37}, {{1, -1, 1, -1, -14}, 17}}) {
    auto E = CurveData::make(coeffs, p);
    INFO("p = " << p << " ap = " << E.ap);
    auto M = eigen_symbol(E, build_basis(p));
    std::vector<mpq_class> plus(M.plus.begin(), M.plus.end());
    auto up = hecke_apply(p, p, plus);
    for (size_t i = 0; i < plus.size(); ++i) CHECK(up[i] == E.ap * plus[i]);
  }
}
