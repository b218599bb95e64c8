#pragma once

#include "mockplectic/modsym.hpp"
#include "mockplectic/padic.hpp"
#include "mockplectic/pball.hpp"

#include <complex>
#include <map>
#include <utility>
#include <vector>

namespace mockplectic {

using Complex = std::complex<double>;

/// x + y sqrt(d) i with d > 0, y > 0.
struct HPoint {
  mpq_class x, y;
  mpz_class d;

  Complex value() const;
  /// (a z + b) / (c z + d) for a real matrix of positive determinant.
  HPoint act(const mpq_class& a, const mpq_class& b, const mpq_class& c, const mpq_class& dd) const;
  HPoint act(const GammaElement& g) const { return act(g.a(), g.b(), g.c(), g.d()); }
};

/// Fundamental-domain reduction z = g^-1 w with g in SL_2(Z) and |Re w| <= 1/2, |w| >= 1.
struct ReducedPoint {
  HPoint w;
  mpz_class a, b, c, d;  // g
};

ReducedPoint reduce_sl2z(const HPoint& z);

/// Imaginary quadratic point of discriminant D < 0 with class number one, p inert.
struct CMPoint {
  mpz_class A, B, C, D;
  long p = 0;
  HPoint tau_inf;
  QuadExtNumber tau_p;

  /// Requires A > 0, p not dividing A, so that tau_p reduces to the standard vertex.
  static CMPoint make(const mpz_class& A, const mpz_class& B, const mpz_class& C, long p, int precision = 30);
  /// The form (1, b, c) of discriminant D with b in {0, 1}.
  static CMPoint principal(const mpz_class& D, long p, int precision = 30);
};

struct ComplexLattice {
  Complex omega1, omega2;   // reduced basis, Im(omega2 / omega1) > 0
  double real_period = 0;   // least positive real element
  Complex imag_period;      // least element on the imaginary axis
  int agm_steps = 0;

  /// Distance from z to the nearest lattice point.
  double distance(const Complex& z) const;
  double scale() const { return std::abs(omega1); }
};

/// Periods of dx / (2y + a1 x + a3) via the arithmetic-geometric mean.
ComplexLattice complex_lattice(const CurveData& E, double tolerance = 1e-18);

/// c4, c6 recomputed from the lattice through E4 and E6.
std::pair<double, double> lattice_invariants(const ComplexLattice& L);

/// Data shared by all edge values of E.
struct CMContext {
  CurveData E;
  ComplexLattice lattice;
  std::vector<long> an;    // a_1..a_M
  int fricke_sign = 0;     // f | W_p = fricke_sign f
  Complex phi_zero;        // Phi(0)
  long torsion = 1;
  int threads = 1;

  static CMContext make(const CurveData& E, int threads = 1, long terms = 400);

  /// Phi(w) = sum_{n <= M} a_n / n e^(2 pi i n w); M from the tail bound when 0.
  Complex phi(const Complex& w, long M = 0, double* error = nullptr) const;
};

struct EdgeValue {
  Ball edge;
  Complex value;               // t_E Phi(gamma tau) up to orientation, modulo Lambda
  GammaElement gamma = GammaElement::identity(2);
  int orientation = 1;
  bool fricke = false;
  long terms = 0;
  double error_bound = 0;
};

/// Throws std::runtime_error when the error bound exceeds 1e-8 |omega1|.
EdgeValue edge_value(const CMContext& ctx, const HPoint& tau, const Ball& edge);

std::vector<EdgeValue> edge_values(const CMContext& ctx, const HPoint& tau, const std::vector<Ball>& edges);

/// Largest lattice distance of the outgoing-edge sums over vertices within the given distance of v_o.
double harmonicity_defect(const CMContext& ctx, const HPoint& tau, int radius);

/// Class of a norm-one unit modulo U_n: the residues of its coordinates mod p^n.
using TorusKey = std::pair<mpz_class, mpz_class>;

TorusKey torus_key(const QuadExtNumber& x, int n);

/// A(t) = (t - tau_p) / (t - taubar_p).
QuadExtNumber homeo_A(const CMPoint& tau, const Cusp& t, int precision);

/// The distance-n edge through infinity, P^1(Q_p) minus p^(1-n) Z_p.
Ball reference_edge(long p, int n);

struct TorusLabel {
  QuadExtNumber alpha;  // norm one, A(sample of the edge)
  TorusKey key;
};

/// Throws std::invalid_argument when the edge is not at distance n from v_o pointing away.
TorusLabel torus_label(const CMPoint& tau, const Ball& edge, int n);

/// Rational 2x2 matrix of iota_tau(x + y tau).
struct RationalMatrix {
  mpq_class a, b, c, d;
  Ball act(const Ball& ball) const;
};

RationalMatrix torus_matrix(const CMPoint& tau, const mpq_class& x, const mpq_class& y);

/// An element of K^x whose torus matrix carries the reference edge to edges labeled alpha (level n).
RationalMatrix torus_element_for(const CMPoint& tau, const QuadExtNumber& alpha, int n);

/// beta-bar / beta for beta = x + y tau_p.
QuadExtNumber torus_character(const CMPoint& tau, const mpq_class& x, const mpq_class& y, int precision);

struct PushforwardReport {
  bool ok = false;
  bool fixed_points = false;   // A(tau) = 0, A(taubar) = inf, A(inf) = 1
  bool images_in_cosets = false;
  bool bijective = false;
  bool refines = false;        // labels at n + 1 reduce to the parent's label
  long edges = 0;
};

PushforwardReport pushforward_check(const CMPoint& tau, int n);

struct PlecticTerm {
  Ball edge;
  Complex value;
  QuadExtNumber alpha;        // torus label
  TorusKey alpha_key;
  QuadExtNumber coefficient;  // log <alpha>
  TorusKey coefficient_key;   // coefficient mod p^n
};

struct PlecticApprox {
  int level = 0;
  long p = 0;
  std::vector<PlecticTerm> terms;
  Complex shadow;             // sum of values
  double shadow_distance = 0; // distance of the shadow to Lambda
};

PlecticApprox plectic_invariant(const CMContext& ctx, const CMPoint& tau, int n);

/// Same edges, coefficients the labels themselves.
PlecticApprox kolyvagin_derivative(const CMContext& ctx, const CMPoint& tau, int n);

/// Complex sums over terms grouped by coefficient mod p^m.
std::map<TorusKey, Complex> fiber_sums(const PlecticApprox& Q, int m);

/// Largest lattice distance between the fiber sums of Q and R at modulus p^m.
double level_defect(const PlecticApprox& Q, const PlecticApprox& R, int m, const ComplexLattice& L);

struct RotationReport {
  bool permutes = false;       // every rotated edge is a term, coefficients shifted by log <beta-bar / beta>
  double shadow_distance = 0;
};

RotationReport galois_rotation(const PlecticApprox& Q, const CMPoint& tau, const mpq_class& x, const mpq_class& y,
                               const ComplexLattice& L);

struct TraceOptions {
  bool twist = true;   // weight values at distance k by a_p^k
  double scale = 1.0;
};

/// max over distance-n edges of the lattice distance of sum(children) - a_p y_e.
double trace_compat_check(const CMContext& ctx, const CMPoint& tau, int n, const TraceOptions& opts = {});

}  // namespace mockplectic
