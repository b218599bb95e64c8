#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mockplectic/padic.hpp"

#include <random>

using namespace mockplectic;

namespace {

PadicNumber random_unit(std::mt19937_64& rng, long p, int n) {
  mpz_class m = prime_power(p, n);
  mpz_class u;
  do {
    u = mpz_class(static_cast<unsigned long>(rng() % 1000000007ULL)) * 1000003 + rng() % 999983;
    u %= m;
  } while (u % p == 0);
  return PadicNumber::from_integer(p, u, n);
}

QuadExtNumber random_quad(std::mt19937_64& rng, long p, int n) {
  PadicNumber a = random_unit(rng, p, n);
  PadicNumber b = random_unit(rng, p, n);
  if (rng() % 3 == 0) b = b * PadicNumber::from_integer(p, p, n);
  return QuadExtNumber::from_components(a, b);
}

}  // namespace

TEST_CASE("addition carries into the valuation") {
  auto x = PadicNumber::from_integer(5, 2, 10);
  auto y = PadicNumber::from_integer(5, 3, 10);
  auto s = x + y;
  CHECK(s.valuation() == 1);
  CHECK(s.unit() % 5 == 1);
}

TEST_CASE("inverse of random units") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    auto x = random_unit(rng, 5, 12);
    auto one = x * x.inverse();
    CHECK(one.agrees_with(PadicNumber::from_integer(5, 1, 12)));
  }
}

TEST_CASE("integer oracle for (1+5)(1-5)") {
  auto a = PadicNumber::from_integer(5, 6, 10);
  auto b = PadicNumber::from_integer(5, -4, 10);
  auto c = a * b;
  CHECK(c.residue(10) == (mpz_class(-24) % prime_power(5, 10) + prime_power(5, 10)) % prime_power(5, 10));
}

TEST_CASE("zero absorbs multiplication") {
  auto z = PadicNumber::zero(7, 6);
  auto x = PadicNumber::from_integer(7, 3, 6);
  CHECK((z * x).is_zero());
  CHECK_THROWS_AS(z.inverse(), PadicError);
  CHECK_THROWS_AS(x + PadicNumber::from_integer(5, 1, 4), PadicError);
}

TEST_CASE("ring axioms on random triples") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 30; ++i) {
    auto x = random_quad(rng, 11, 10), y = random_quad(rng, 11, 10), z = random_quad(rng, 11, 10);
    CHECK(((x * y) * z).agrees_with(x * (y * z)));
    CHECK((x * (y + z)).agrees_with(x * y + x * z));
    CHECK((x * y).conjugate().agrees_with(x.conjugate() * y.conjugate()));
    CHECK(x.conjugate().conjugate() == x);
  }
}

TEST_CASE("teichmuller lifts") {
  auto one = PadicNumber::from_integer(5, 1, 10);
  CHECK(teichmuller(one) == one);
  auto w = teichmuller(PadicNumber::from_integer(5, 2, 10));
  CHECK(w.pow(4) == one);
  CHECK(w.residue(1) == 2);
  mpz_class t = 2;
  mpz_class m = prime_power(5, 10);
  for (int k = 0; k < 12; ++k) mpz_powm_ui(t.get_mpz_t(), t.get_mpz_t(), 5, m.get_mpz_t());
  CHECK(w.residue(10) == t);
  CHECK_THROWS_AS(teichmuller(PadicNumber::from_integer(5, 10, 10)), PadicError);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto x = random_quad(rng, 7, 8);
    if (x.valuation() != 0) continue;
    auto wx = teichmuller(x);
    CHECK(wx.pow(48).agrees_with(QuadExtNumber::from_padic(PadicNumber::from_integer(7, 1, 8))));
  }
}

TEST_CASE("angle is multiplicative") {
  auto one = PadicNumber::from_integer(5, 1, 10);
  CHECK(angle(one) == one);
  CHECK(angle(PadicNumber::from_integer(5, 5, 10)).agrees_with(one));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto x = random_unit(rng, 5, 10), y = random_unit(rng, 5, 10) * PadicNumber::from_integer(5, 25, 10);
    CHECK(angle(x * y).agrees_with(angle(x) * angle(y)));
  }
  CHECK_THROWS_AS(angle(PadicNumber::zero(5, 10)), PadicError);
}

TEST_CASE("log series against a rational oracle") {
  auto br = LogBranch::principal(5, 10);
  CHECK(log(PadicNumber::from_integer(5, 1, 10), br).is_zero());
  mpq_class s = 0;
  mpz_class pk = 1;
  for (int k = 1; k <= 30; ++k) {
    pk *= 5;
    mpq_class term(pk, k);
    s += (k % 2 == 1) ? term : -term;
  }
  s.canonicalize();
  auto expect = PadicNumber::from_rational(5, s, 8);
  auto got = log_principal(PadicNumber::from_integer(5, 6, 12));
  CHECK(got.with_precision(7).agrees_with(expect.with_precision(7)));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 30; ++i) {
    auto x = random_quad(rng, 11, 12), y = random_quad(rng, 11, 12);
    auto br11 = LogBranch::principal(11, 12);
    auto d = log(x * y, br11) - log(x, br11) - log(y, br11);
    CHECK((d.is_zero() || d.valuation() >= 10));
    CHECK(log(x.conjugate(), br11).agrees_with(log(x, br11).conjugate()));
  }
}

TEST_CASE("log_q branch kills q") {
  auto q = PadicNumber::from_parts(11, 5, 123457, 12);
  auto br = LogBranch::vanishing_at(q);
  auto l = log(q, br);
  CHECK((l.is_zero() || l.valuation() >= 11));
}

TEST_CASE("embedding sqrt(-67) at 11") {
  auto a = embed_quadratic(11, -67, 20);
  auto d = QuadExtNumber::from_padic(PadicNumber::from_integer(11, -67, 20));
  auto diff = a * a - d;
  CHECK(diff.is_zero());
  CHECK(diff.absolute_precision() >= 20);
  CHECK(a.conjugate() == -a);
  CHECK(a.norm().agrees_with(PadicNumber::from_integer(11, 67, 20)));
  CHECK_THROWS_AS(embed_quadratic(11, 3, 10), PadicError);
}

TEST_CASE("sqrt of a unit square") {
  auto x = PadicNumber::from_integer(7, 2, 15);
  auto r = sqrt_unit(x);
  CHECK((r * r).agrees_with(x));
}
