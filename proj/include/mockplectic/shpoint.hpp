#pragma once

#include "mockplectic/lfun.hpp"
#include "mockplectic/measure.hpp"
#include "mockplectic/modsym.hpp"
#include "mockplectic/padic.hpp"
#include "mockplectic/weierstrass.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mockplectic {

/// Root tau = (-B + sqrt D) / (2A) of A x^2 + B x + C, with sqrt D = embed_quadratic(p, D).
struct RMPoint {
  mpz_class A, B, C, D;
  long p = 0;
  QuadExtNumber tau;

  /// Requires a primitive form, D > 0 not a square, D prime to p and a non-residue mod p.
  static RMPoint make(const mpz_class& A, const mpz_class& B, const mpz_class& C, long p, int precision = 20);
  /// The other root, as the point of the form (-A, -B, -C).
  RMPoint conjugate() const;
  /// gamma tau for gamma in SL_2(Z), with the transported form.
  RMPoint transform(const GammaElement& g) const;
};

/// Least eps = (x + y sqrt D) / 2 > 1 of norm +1.
struct AutomorphGamma {
  GammaElement gamma = GammaElement::identity(2);
  mpz_class x, y;
};

/// x^2 - D y^2 = 4 with y > 0 minimal; x > 0.
std::pair<mpz_class, mpz_class> pell_four(const mpz_class& D);

AutomorphGamma order_and_gamma(const RMPoint& tau);

struct StarkHeegnerPoint {
  QuadExtNumber u_plus, u_minus;      // prod ((tau - t) / (taubar - t))^mu
  QuadExtNumber log_plus, log_minus;  // log0 of the above
  long ord_plus = 0, ord_minus = 0;   // modulo v(q) once reduced
  int depth = 0;
  int agreement = 0;                  // v(u(depth) / u(depth - 1) - 1)
  Cusp r;
  GammaElement gamma = GammaElement::identity(2);
};

StarkHeegnerPoint stark_heegner(std::shared_ptr<const EigenSymbol> symbol, const RMPoint& tau, int depth,
                                const Cusp& r = Cusp::rational(0), const IntegrationOptions& opts = {});

/// Point over K_p on a Weierstrass model.
struct KpPoint {
  bool infinity = true;
  QuadExtNumber x, y;
};

/// Tate curve y^2 + xy = x^3 + a4 x + a6 for the period q.
struct TateCurve {
  PadicNumber q;
  PadicNumber a4, a6;
  PadicNumber c4, c6;
};

TateCurve tate_curve(const PadicNumber& q);

/// Point of E_q attached to u, after rescaling u into v(q) > v(u) >= 0.
KpPoint tate_point(const TateCurve& Eq, const QuadExtNumber& u);

/// Isomorphism data E_q -> E: X_E = lambda^2 X_q, Y_E = lambda^3 Y_q on the short models.
struct TateIsomorphism {
  QuadExtNumber lambda;
};

TateIsomorphism tate_isomorphism(const TateCurve& Eq, const CurveData& E, int precision);

KpPoint to_curve(const KpPoint& P, const TateCurve& Eq, const TateIsomorphism& iso, const CurveData& E);

/// tate_point followed by the isomorphism onto the model of E.
KpPoint tate_parametrize(const QuadExtNumber& u, const TatePeriod& T, const CurveData& E);

/// Residual of the Weierstrass equation at P (a1..a6 as p-adic numbers).
QuadExtNumber weierstrass_residual(const KpPoint& P, const PadicNumber& a1, const PadicNumber& a2,
                                   const PadicNumber& a3, const PadicNumber& a4, const PadicNumber& a6);

/// Formal-group logarithm in z = -x / y of a point reducing to the origin.
QuadExtNumber formal_log(const KpPoint& P, const PadicNumber& a1, const PadicNumber& a2, const PadicNumber& a3,
                         const PadicNumber& a4, const PadicNumber& a6);
QuadExtNumber tate_formal_log(const TateCurve& Eq, const KpPoint& P);

/// Rational reconstruction of x mod p^k with |num|, den <= bound.
std::optional<mpq_class> rational_reconstruct(const mpz_class& x, const mpz_class& modulus, const mpz_class& bound);

struct KPoint {
  QuadRational x, y;
};

/// y with (x, y) on E over Q(sqrt D), if one exists.
std::optional<KPoint> lift_x(const CurveData& E, const QuadRational& x);

/// Element of Q(sqrt D) with naive height <= H agreeing with X to the given absolute precision.
std::optional<QuadRational> recognize(const QuadExtNumber& X, const mpz_class& D, const mpz_class& H, int precision);

/// Recognized x-coordinate on E (validated by exact substitution) or none.
std::optional<KPoint> recognize_point(const CurveData& E, const QuadExtNumber& X, const mpz_class& D,
                                      const mpz_class& H, int precision);

/// Naive search of points of E(Q(sqrt D)) with x = (a + b sqrt D) / c, |a|, |b|, c <= H.
std::vector<KPoint> naive_points(const CurveData& E, const mpz_class& D, long H);

mpz_class naive_height(const QuadRational& x);

/// Coefficients a1..a6 of E as elements of K_p.
struct KpModel {
  QuadExtNumber a1, a2, a3, a4, a6;
  static KpModel of(const CurveData& E, int precision);
};

KpPoint kp_add(const KpModel& W, const KpPoint& P, const KpPoint& Q);
KpPoint kp_mul(const KpModel& W, long n, const KpPoint& P);
KpPoint embed_point(const KPoint& P, long p, int precision);
QuadExtNumber curve_formal_log(const CurveData& E, const KpPoint& P, int precision);

struct Recognition {
  bool recognized = false;
  KPoint point;
  long multiplier = 0;   // recognized point is the image of u^multiplier (times a root of unity)
  int component = 0;     // 0: plus, 1: minus
  int precision = 0;     // digits used for reconstruction
  mpz_class height_bound;
  std::vector<KPoint> oracle;        // naive search of E(Q(sqrt D))
  std::optional<mpq_class> log_ratio; // log P / log(oracle[0]), plus component
};

/// Reconstructs the x-coordinate of the Tate image of u^m (m | t_bound) on both components, up to
/// roots of unity, for each H in bounds; validated by substitution. Also runs the naive search to
/// height oracle_height and reports the logarithmic ratio to the first non-torsion oracle point.
Recognition recognize_stark_heegner(const CurveData& E, const StarkHeegnerPoint& P, const TatePeriod& T,
                                    const mpz_class& D, const std::vector<long>& bounds, long t_bound,
                                    long oracle_height);

}  // namespace mockplectic
