#pragma once

#include "mockplectic/measure.hpp"
#include "mockplectic/modsym.hpp"
#include "mockplectic/padic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mockplectic {

struct InterpolationValues {
  SymbolValue total;  // mu[0,inf](Z_p)
  SymbolValue units;  // mu[0,inf](Z_p^x)
  SymbolValue p_ball; // mu[0,inf](pZ_p)
};

InterpolationValues interpolation(const HarmonicMeasure& mu);

/// The p - 1 balls j + pZ_p, j = 1..p-1.
std::vector<Ball> unit_balls(long p);

struct LValues {
  SymbolValue value;     // L_p(E,1) = mu(Z_p^x)
  Integral derivative;   // int_{Z_p^x} log<x> dmu
};

LValues lp_value_and_derivative(const HarmonicMeasure& mu, int depth, const IntegrationOptions& opts = {});

struct TwistedPartial {
  mpz_class a, c;
  SymbolValue total, units;
  Integral derivative;
};

/// Partials for mu[-a/c, inf]; c must be prime to p.
TwistedPartial lp_partial_twisted(std::shared_ptr<const EigenSymbol> symbol, const mpz_class& a,
                                  const mpz_class& c, int depth, const IntegrationOptions& opts = {});

/// c(-1), c(0), ..., c(M) with j = sum c(n) q^n. Uses the directory in
/// MOCKPLECTIC_CACHE_DIR as an on-disk cache when set.
std::vector<mpz_class> j_coefficients(long M);

/// j(q) from E4^3 / Delta evaluated by products, independently of the j-series.
PadicNumber j_invariant_of(const PadicNumber& q);

struct TatePeriod {
  PadicNumber q;
  int ord = 0;
  LogBranch branch;   // log_q(q) = 0
  int agreement = 0;  // relative digits to which j(q) = j(E)
};

TatePeriod tate_period(const CurveData& E, int precision);

struct PeriodJ {
  SymbolValue ord;
  QuadExtNumber log_plus, log_minus;
  GammaElement gamma = GammaElement::identity(2);
  int depth = 0;
  int base_point_agreement = 0;  // v(difference of the log parts for two base points)
  bool ord_base_point_equal = false;
};

/// gamma = g diag(p^k, p^-k) g^-1 with g(0) = r, g(inf) = s, least k >= 1 landing in SL_2(Z[1/p]).
/// Built for the pair ordered with infinity last and then by value, so that
/// swapping r and s leaves gamma unchanged.
GammaElement hyperbolic_stabilizer(long p, const Cusp& r, const Cusp& s);

PeriodJ period_J(std::shared_ptr<const EigenSymbol> symbol, const Cusp& r, const Cusp& s, int depth,
                 const IntegrationOptions& opts = {});

struct MttResult {
  int depth = 0;
  int residual = 0;     // v(ord(q) log J - log<q> ord J), plus part
  int control = 0;      // same with q replaced by q (1 + p)
  int derivative_residual = 0;  // v(ord(q) L_p' - log<q> mu(Z_p)), plus part
  PeriodJ J;
  TatePeriod tate;
  LValues lp;
  int expected_ord_factor = 0;  // delta_p(E): 1 for a_p = +1, 0 for a_p = -1
};

MttResult mtt_check(const CurveData& E, std::shared_ptr<const EigenSymbol> symbol, int depth,
                    const IntegrationOptions& opts = {});

/// v of a residual; a zero residual reports its absolute precision.
int residual_valuation(const QuadExtNumber& x);

}  // namespace mockplectic
