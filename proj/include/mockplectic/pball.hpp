#pragma once

#include "mockplectic/padic.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace mockplectic {

/// A point of P^1(Q): num/den in lowest terms with den >= 0; (1, 0) is infinity.
struct Cusp {
  mpz_class num = 1;
  mpz_class den = 0;

  static Cusp infinity() { return Cusp{1, 0}; }
  static Cusp rational(const mpq_class& q);
  static Cusp make(const mpz_class& num, const mpz_class& den);

  bool is_infinity() const { return den == 0; }
  mpq_class value() const;  // throws for infinity
  bool operator==(const Cusp& o) const { return num == o.num && den == o.den; }
  std::string str() const;
};

/// Compact open ball of P^1(Q_p). Affine balls are {x : v(x - c) >= level}
/// with center c = center_num / p^center_den_exp; coaffine balls are the
/// complement of the affine ball with the same fields.
///
/// Canonical form: 0 <= c < p^level, and either center_den_exp = 0 or p does
/// not divide center_num.
struct Ball {
  long p = 0;
  bool coaffine = false;
  mpz_class center_num = 0;
  int center_den_exp = 0;
  int level = 0;

  static Ball affine(long p, const mpq_class& center, int level);
  static Ball complement_of(long p, const mpq_class& center, int level);
  /// Z_p.
  static Ball integers(long p) { return affine(p, 0, 0); }

  mpq_class center() const;
  Ball complement() const;

  /// Exact membership of a rational point or infinity.
  bool contains(const Cusp& x) const;
  /// Membership of a p-adic point; throws PadicError when precision is insufficient.
  bool contains(const PadicNumber& x) const;
  /// Whether other is a subset of this ball.
  bool contains(const Ball& other) const;
  bool disjoint_from(const Ball& other) const;

  /// Canonical sample point: the center for affine balls, infinity otherwise.
  Cusp sample() const;

  bool operator==(const Ball& o) const {
    return p == o.p && coaffine == o.coaffine && center_num == o.center_num &&
           center_den_exp == o.center_den_exp && level == o.level;
  }
  bool operator<(const Ball& o) const;
  std::string str() const;
};

/// Vertex of the Bruhat-Tits tree: the lattice class of [[p^level, a], [0, 1]],
/// i.e. the vertex whose outgoing edges split the affine ball (center, level).
struct Vertex {
  long p = 0;
  mpz_class center_num = 0;
  int center_den_exp = 0;
  int level = 0;

  static Vertex make(long p, const mpq_class& center, int level);
  static Vertex standard(long p) { return make(p, 0, 0); }
  mpq_class center() const;
  Ball ball() const;
  bool operator==(const Vertex& o) const {
    return p == o.p && center_num == o.center_num && center_den_exp == o.center_den_exp &&
           level == o.level;
  }
  std::string str() const;
};

/// Oriented edges are identified with their balls U_e.
struct OrientedEdge {
  Ball ball;

  /// e_infinity, with U = P^1(Q_p) - Z_p.
  static OrientedEdge standard(long p);
  OrientedEdge reverse() const { return OrientedEdge{ball.complement()}; }
  Vertex source() const;
  Vertex target() const;
  bool operator==(const OrientedEdge& o) const { return ball == o.ball; }
};

/// Element of SL_2(Z[1/p]).
class GammaElement {
 public:
  GammaElement(long p, mpq_class a, mpq_class b, mpq_class c, mpq_class d);
  static GammaElement identity(long p) { return GammaElement(p, 1, 0, 0, 1); }

  long prime() const { return p_; }
  const mpq_class& a() const { return a_; }
  const mpq_class& b() const { return b_; }
  const mpq_class& c() const { return c_; }
  const mpq_class& d() const { return d_; }

  GammaElement operator*(const GammaElement& o) const;
  GammaElement inverse() const;
  bool operator==(const GammaElement& o) const {
    return p_ == o.p_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_ && d_ == o.d_;
  }

  Cusp act(const Cusp& x) const;
  Ball act(const Ball& b) const;
  OrientedEdge act(const OrientedEdge& e) const { return OrientedEdge{act(e.ball)}; }
  QuadExtNumber act(const QuadExtNumber& z) const;
  std::string str() const;

 private:
  long p_;
  mpq_class a_, b_, c_, d_;
};

/// v_p of a nonzero rational.
int valuation_of(const mpq_class& q, long p);

/// The p+1 outgoing edges at v; their balls partition P^1(Q_p).
std::vector<OrientedEdge> edges_at(const Vertex& v);

struct EdgeReduction {
  GammaElement gamma;
  int orientation;  // +1: gamma e = e_infinity, -1: gamma e = reverse(e_infinity)
};

/// Finds gamma in SL_2(Z[1/p]) carrying e to e_infinity or its reverse.
EdgeReduction reduce_edge(const OrientedEdge& e);

/// The p maximal proper sub-balls of b.
std::vector<Ball> refine(const Ball& b);

/// The balls of the (p+1) p^(n-1) edges at distance n from v_o pointing away from it.
std::vector<Ball> covering(long p, int depth);

/// Vertex whose affinoid contains z, for z in K_p outside Q_p.
Vertex reduction_point(const QuadExtNumber& z);

}  // namespace mockplectic
