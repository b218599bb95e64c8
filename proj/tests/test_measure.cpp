#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mockplectic/measure.hpp"

#include <random>

using namespace mockplectic;

namespace {

constexpr long P = 11;

std::shared_ptr<const EigenSymbol> symbol11() {
  static auto M = std::make_shared<const EigenSymbol>(
      eigen_symbol(CurveData::make({0, -1, 1, -10, -20}, P), build_basis(P)));
  return M;
}

Cusp random_cusp(std::mt19937_64& rng) {
  return Cusp::make(static_cast<long>(rng() % 2001) - 1000, static_cast<long>(rng() % 300) + 1);
}

Ball random_ball(std::mt19937_64& rng) {
  long num = static_cast<long>(rng() % 100000);
  int k = static_cast<int>(rng() % 3);
  mpq_class c(num, prime_power(P, k));
  c.canonicalize();
  Ball b = Ball::affine(P, c, static_cast<int>(rng() % 8) - 3);
  return rng() % 2 ? b.complement() : b;
}

GammaElement random_gamma(std::mt19937_64& rng) {
  GammaElement g = GammaElement::identity(P);
  for (int i = 0; i < 5; ++i) {
    long t = static_cast<long>(rng() % 11) - 5;
    switch (rng() % 3) {
      case 0: g = GammaElement(P, 1, t, 0, 1) * g; break;
      case 1: g = GammaElement(P, 0, -1, 1, 0) * g; break;
      default: g = GammaElement(P, P, 0, 0, mpq_class(1, P)) * g;
    }
  }
  return g;
}

QuadExtNumber random_point(std::mt19937_64& rng, int prec = 16) {
  auto a = PadicNumber::from_integer(P, static_cast<long>(rng() % 100000), prec);
  long b = static_cast<long>(rng() % 100000);
  if (b % P == 0) ++b;
  return QuadExtNumber::from_components(a, PadicNumber::from_integer(P, b, prec));
}

std::vector<Vertex> ball_of_vertices(int radius) {
  std::vector<Vertex> out{Vertex::standard(P)};
  std::vector<Vertex> frontier = out;
  for (int r = 0; r < radius; ++r) {
    std::vector<Vertex> next;
    for (const auto& v : frontier)
      for (const auto& e : edges_at(v)) {
        Vertex w = e.target();
        if (vertex_depth(w) == r + 1) next.push_back(w);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = next;
  }
  return out;
}

}  // namespace

TEST_CASE("total measure and interpolation") {
  HarmonicMeasure mu(symbol11(), Cusp::rational(0), Cusp::infinity());
  auto zp = mu.measure(Ball::integers(P));
  auto out = mu.measure(Ball::complement_of(P, 0, 0));
  CHECK(zp + out == SymbolValue{0, 0});
  CHECK(zp == -symbol11()->eval(Cusp::rational(0), Cusp::infinity()));
  SymbolValue units{0, 0};
  for (long j = 1; j < P; ++j) units = units + mu.measure(Ball::affine(P, j, 1));
  CHECK(units == zp - mu.measure(Ball::affine(P, 0, 1)));
  CHECK(units == SymbolValue{0, 0});  // split multiplicative reduction
}

TEST_CASE("fast path matches the exact reduction") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    HarmonicMeasure mu(symbol11(), random_cusp(rng), random_cusp(rng));
    for (int j = 0; j < 100; ++j) {
      Ball b = random_ball(rng);
      int K = b.center_den_exp + 1;
      __int128 C = static_cast<__int128>(b.center_num.get_si()) * static_cast<__int128>(prime_power(P, K - b.center_den_exp).get_si());
      long fp, fm;
      mu.measure_fast(C, K, b.level, b.coaffine, fp, fm);
      auto v = mu.measure(b);
      CHECK(v.plus == fp);
      CHECK(v.minus == fm);
    }
  }
}

TEST_CASE("harmonicity near v_o") {
  std::mt19937_64 rng(2);
  auto verts = ball_of_vertices(3);
  CHECK(verts.size() == 1 + 12 + 12 * 11 + 12 * 121);
  std::vector<std::unique_ptr<HarmonicMeasure>> mus;
  mus.push_back(std::make_unique<HarmonicMeasure>(symbol11(), Cusp::rational(0), Cusp::infinity()));
  for (int i = 0; i < 5; ++i)
    mus.push_back(std::make_unique<HarmonicMeasure>(symbol11(), random_cusp(rng), random_cusp(rng)));
  for (const auto& mu : mus)
    for (const auto& v : verts) CHECK(mu->check_harmonic(v));
  HarmonicMeasure bad(symbol11(), Cusp::rational(0), Cusp::infinity());
  bad.poison(Ball::affine(P, 3, 1), SymbolValue{1, 0});
  CHECK_FALSE(bad.check_harmonic(Vertex::standard(P)));
}

TEST_CASE("additivity and equivariance") {
  std::mt19937_64 rng(3);
  HarmonicMeasure mu(symbol11(), random_cusp(rng), random_cusp(rng));
  for (int i = 0; i < 100; ++i) {
    Ball b = random_ball(rng);
    SymbolValue sum{0, 0};
    for (const auto& c : refine(b)) sum = sum + mu.measure(c);
    CHECK(sum == mu.measure(b));
  }
  for (int i = 0; i < 100; ++i) {
    GammaElement g = random_gamma(rng);
    Ball b = random_ball(rng);
    HarmonicMeasure moved(symbol11(), g.act(mu.r()), g.act(mu.s()));
    CHECK(moved.measure(g.act(b)) == mu.measure(b));
  }
}

TEST_CASE("locally constant kernels") {
  HarmonicMeasure mu(symbol11(), Cusp::rational(0), Cusp::infinity());
  auto z = QuadExtNumber::generator(P, 16);
  auto I = riemann_integrate(mu, Kernel::log_cross_ratio(z, z), 3);
  CHECK(I.plus.is_zero());
  CHECK(I.balls == 12 * 121);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    Ball b = Ball::affine(P, static_cast<long>(rng() % 1331), static_cast<int>(rng() % 3) + 1);
    auto J = riemann_integrate(mu, Kernel::coset_indicator(b), 3);
    auto v = mu.measure(b);
    CHECK(J.ord_plus == v.plus.get_si());
    CHECK(J.ord_minus == v.minus.get_si());
    auto Jc = riemann_integrate(mu, Kernel::coset_indicator(b.complement()), 3);
    CHECK(J.ord_plus + Jc.ord_plus == 0);
  }
}

TEST_CASE("ord integrals") {
  HarmonicMeasure mu(symbol11(), Cusp::rational(0), Cusp::infinity());
  std::mt19937_64 rng(5);
  auto z1 = random_point(rng);
  auto z2 = QuadExtNumber::from_components(PadicNumber::from_integer(P, 3, 16), PadicNumber::from_integer(P, 121, 16));
  CHECK(ord_integral(mu, z1, z1).value == SymbolValue{0, 0});
  auto a = ord_integral(mu, z1, z2), b = ord_integral(mu, z2, z1);
  CHECK(a.value == -b.value);
  CHECK(a.check_depth == a.depth + 1);
  auto far = riemann_integrate(mu, Kernel::ord_cross_ratio(z1, z2), a.depth + 2);
  CHECK(far.ord_plus == a.value.plus.get_si());
}

TEST_CASE("Teitelbaum log kernels") {
  std::mt19937_64 rng(6);
  HarmonicMeasure mu(symbol11(), random_cusp(rng), random_cusp(rng));
  auto z1 = random_point(rng), z2 = random_point(rng), z3 = random_point(rng);
  for (int n = 2; n <= 4; ++n) {
    auto a = teitelbaum_log(mu, z1, z2, n), b = teitelbaum_log(mu, z1, z2, n + 1);
    auto d = a.plus - b.plus;
    CHECK((d.is_zero() || d.valuation() >= n - 2));
    auto t12 = teitelbaum_log(mu, z1, z2, n), t23 = teitelbaum_log(mu, z2, z3, n), t13 = teitelbaum_log(mu, z1, z3, n);
    auto e = t12.plus + t23.plus - t13.plus;
    CHECK((e.is_zero() || e.valuation() >= n - 2));
  }
  auto zero = teitelbaum_log(mu, z1, z1, 3);
  CHECK(zero.plus.is_zero());
  // equivariance under an element of Gamma
  GammaElement g(P, 2, 1, 1, 1);
  HarmonicMeasure moved(symbol11(), g.act(mu.r()), g.act(mu.s()));
  auto a = teitelbaum_log(mu, z1, z2, 4);
  auto b = teitelbaum_log(moved, g.act(z1), g.act(z2), 4);
  auto d = a.plus - b.plus;
  CHECK((d.is_zero() || d.valuation() >= 2));
}

TEST_CASE("threads do not change results") {
  std::mt19937_64 rng(7);
  HarmonicMeasure mu(symbol11(), random_cusp(rng), random_cusp(rng));
  auto z1 = random_point(rng), z2 = random_point(rng);
  IntegrationOptions one, four;
  four.threads = 4;
  auto a = teitelbaum_log(mu, z1, z2, 3, one), b = teitelbaum_log(mu, z1, z2, 3, four);
  CHECK(a.plus == b.plus);
  CHECK(a.minus == b.minus);
}
