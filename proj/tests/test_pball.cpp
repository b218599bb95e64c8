#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mockplectic/pball.hpp"

#include <random>

using namespace mockplectic;

namespace {

mpq_class random_center(std::mt19937_64& rng, long p) {
  mpz_class num = static_cast<long>(rng() % 200000) - 100000;
  int k = static_cast<int>(rng() % 3);
  mpq_class c(num, prime_power(p, k));
  c.canonicalize();
  return c;
}

Ball random_ball(std::mt19937_64& rng, long p) {
  int level = static_cast<int>(rng() % 10) - 3;
  Ball b = Ball::affine(p, random_center(rng, p), level);
  return rng() % 2 ? b.complement() : b;
}

GammaElement random_gamma(std::mt19937_64& rng, long p) {
  GammaElement g = GammaElement::identity(p);
  GammaElement S(p, 0, -1, 1, 0);
  for (int i = 0; i < 6; ++i) {
    long t = static_cast<long>(rng() % 21) - 10;
    switch (rng() % 3) {
      case 0: g = GammaElement(p, 1, t, 0, 1) * g; break;
      case 1: g = S * g; break;
      default: {
        mpq_class a = p;
        if (rng() % 2) a = mpq_class(1, p);
        g = GammaElement(p, a, 0, 0, 1 / a) * g;
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("canonical form") {
  CHECK(Ball::affine(5, 7, 1) == Ball::affine(5, 2, 1));
  CHECK(Ball::affine(5, mpq_class(1, 5), 0) == Ball::affine(5, mpq_class(1, 5), 0));
  CHECK(Ball::affine(5, mpq_class(26, 5), 0) == Ball::affine(5, mpq_class(1, 5), 0));
  CHECK(Ball::affine(5, mpq_class(3, 25), -2) == Ball::affine(5, 0, -2));
  CHECK(Ball::affine(5, 10, 1).center() == 0);
}

TEST_CASE("reversal") {
  long p = 11;
  auto e = OrientedEdge::standard(p);
  CHECK(e.reverse().ball == Ball::integers(p));
  CHECK(OrientedEdge{Ball::affine(p, 3, 1)}.reverse().ball == Ball::complement_of(p, 3, 1));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    OrientedEdge f{random_ball(rng, p)};
    CHECK(f.reverse().reverse() == f);
    CHECK(f.source() == f.reverse().target());
  }
}

TEST_CASE("Mobius action on balls") {
  long p = 5;
  GammaElement S(p, 0, -1, 1, 0);
  CHECK(S.act(Ball::complement_of(p, 0, 0)) == Ball::affine(p, 0, 1));
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    Ball b = random_ball(rng, p);
    CHECK(GammaElement::identity(p).act(b) == b);
    auto g1 = random_gamma(rng, p), g2 = random_gamma(rng, p);
    CHECK((g1 * g2).act(b) == g1.act(g2.act(b)));
    CHECK(g1.act(b.complement()) == g1.act(b).complement());
    // sampled points stay in the image
    for (int j = 0; j < 5; ++j) {
      mpq_class x = random_center(rng, p);
      Cusp c = Cusp::rational(x);
      CHECK(b.contains(c) == g1.act(b).contains(g1.act(c)));
    }
  }
}

TEST_CASE("edges at a vertex partition P1") {
  long p = 7;
  auto es = edges_at(Vertex::standard(p));
  REQUIRE(es.size() == 8);
  CHECK(es[0].ball == Ball::complement_of(p, 0, 0));
  for (long j = 0; j < p; ++j) CHECK(es[j + 1].ball == Ball::affine(p, j, 1));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    Vertex v = Vertex::make(p, random_center(rng, p), static_cast<int>(rng() % 8) - 3);
    auto edges = edges_at(v);
    CHECK(edges.size() == static_cast<size_t>(p + 1));
    for (size_t a = 0; a < edges.size(); ++a) {
      CHECK(edges[a].source() == v);
      for (size_t b = a + 1; b < edges.size(); ++b) CHECK(edges[a].ball.disjoint_from(edges[b].ball));
    }
    CHECK(edges[0].ball.contains(Cusp::infinity()));
  }
}

TEST_CASE("reduce_edge") {
  long p = 11;
  auto e = OrientedEdge::standard(p);
  auto r = reduce_edge(e);
  CHECK(r.orientation == 1);
  CHECK(r.gamma.act(e) == e);
  auto rr = reduce_edge(e.reverse());
  CHECK(rr.orientation == -1);
  CHECK(rr.gamma.act(e.reverse()) == e.reverse());
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    int level = static_cast<int>(rng() % 13) - 6;
    Ball b = Ball::affine(p, random_center(rng, p), level);
    if (rng() % 2) b = b.complement();
    auto red = reduce_edge(OrientedEdge{b});
    Ball img = red.gamma.act(b);
    CHECK(img == (red.orientation == 1 ? e.ball : e.ball.complement()));
  }
}

TEST_CASE("refinement and coverings") {
  long p = 5;
  auto kids = refine(Ball::integers(p));
  REQUIRE(kids.size() == 5);
  for (long j = 0; j < p; ++j) CHECK(kids[j] == Ball::affine(p, j, 1));
  for (int n = 1; n <= 4; ++n) {
    auto cov = covering(p, n);
    size_t expect = (p + 1);
    for (int i = 1; i < n; ++i) expect *= p;
    CHECK(cov.size() == expect);
    for (size_t a = 0; a < cov.size() && a < 40; ++a)
      for (size_t b = a + 1; b < cov.size(); ++b) CHECK(cov[a].disjoint_from(cov[b]));
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Ball b = random_ball(rng, p);
    for (const auto& c : refine(b)) {
      CHECK(b.contains(c));
      CHECK(b.contains(c.sample()));
    }
  }
  // the depth-n covering refines the depth-(n-1) one
  auto c2 = covering(p, 2), c3 = covering(p, 3);
  for (const auto& small : c3) {
    int parents = 0;
    for (const auto& big : c2) parents += big.contains(small) ? 1 : 0;
    CHECK(parents == 1);
  }
}

TEST_CASE("membership") {
  long p = 5;
  CHECK(Ball::integers(p).contains(Cusp::rational(0)));
  CHECK(Ball::complement_of(p, 0, 0).contains(Cusp::infinity()));
  CHECK(Ball::integers(p).contains(PadicNumber::from_integer(p, 12, 6)));
  CHECK_FALSE(Ball::integers(p).contains(PadicNumber::from_rational(p, mpq_class(1, 5), 6)));
  CHECK_THROWS_AS(Ball::affine(p, 0, 8).contains(PadicNumber::zero(p, 4)), PadicError);
}

TEST_CASE("reduction map") {
  long p = 11;
  auto s = QuadExtNumber::generator(p, 10);
  CHECK(reduction_point(s) == Vertex::standard(p));
  auto ps = s * QuadExtNumber::from_padic(PadicNumber::from_integer(p, p, 10));
  CHECK(reduction_point(ps) == Vertex::make(p, 0, 1));
  auto z = QuadExtNumber::from_components(PadicNumber::from_integer(p, 3 + 5 * 11, 10),
                                          PadicNumber::from_integer(p, 121, 10));
  Vertex v = reduction_point(z);
  CHECK(v == Vertex::make(p, 3 + 5 * 11, 2));
  CHECK(reduction_point(z.conjugate()) == v);
  CHECK_THROWS_AS(reduction_point(QuadExtNumber::from_padic(PadicNumber::from_integer(p, 3, 10))), PadicError);
}
