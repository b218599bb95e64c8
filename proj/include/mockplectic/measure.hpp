#pragma once

#include "mockplectic/modsym.hpp"
#include "mockplectic/padic.hpp"
#include "mockplectic/pball.hpp"

#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

namespace mockplectic {

/// mu_f[r,s] on compact open balls: mu(U_e) = orientation * m[gamma r, gamma s]
/// where reduce_edge(e) = (gamma, orientation).
class HarmonicMeasure {
 public:
  HarmonicMeasure(std::shared_ptr<const EigenSymbol> symbol, Cusp r, Cusp s);

  const EigenSymbol& symbol() const { return *symbol_; }
  std::shared_ptr<const EigenSymbol> symbol_ptr() const { return symbol_; }
  const Cusp& r() const { return r_; }
  const Cusp& s() const { return s_; }
  long prime() const { return symbol_->p; }

  /// Exact value through the tree reduction, memoized by canonical ball.
  SymbolValue measure(const Ball& U) const;
  /// Same value without memo or big integers, for the ball
  /// (C / p^K + p^level Z_p), or its complement when coaffine.
  void measure_fast(__int128 C, int K, int level, bool coaffine, long& plus, long& minus) const;

  /// Sum of the p+1 edge values at v is zero.
  bool check_harmonic(const Vertex& v) const;

  /// Overwrites a memo entry (negative controls in tests).
  void poison(const Ball& U, const SymbolValue& value) const;

 private:
  std::shared_ptr<const EigenSymbol> symbol_;
  Cusp r_, s_;
  __int128 rn_ = 0, rd_ = 0, sn_ = 0, sd_ = 0;
  mutable std::shared_mutex mutex_;
  mutable std::map<Ball, SymbolValue> memo_;
};

enum class KernelKind { LogCrossRatio, LogLinear, PowerAngle, OrdCrossRatio, CosetIndicator };

/// Integrands in the sample point t of each ball:
///   LogCrossRatio   log((z2 - t) / (z1 - t)), value 1 at infinity
///   LogLinear       log(t - z1), singular at infinity
///   PowerAngle      <t>^exponent, singular at infinity
///   OrdCrossRatio   v(z2 - t) - v(z1 - t)
///   CosetIndicator  1 if t lies in ball
struct Kernel {
  KernelKind kind = KernelKind::LogCrossRatio;
  QuadExtNumber z1, z2;
  long exponent = 0;
  Ball ball;

  static Kernel log_cross_ratio(const QuadExtNumber& z1, const QuadExtNumber& z2);
  static Kernel log_linear(const QuadExtNumber& z);
  static Kernel power_angle(long exponent);
  static Kernel ord_cross_ratio(const QuadExtNumber& z1, const QuadExtNumber& z2);
  static Kernel coset_indicator(const Ball& b);
};

struct Integral {
  int depth = 0;
  size_t balls = 0;
  QuadExtNumber plus, minus;   // value in K_p (x) Lambda_f
  long ord_plus = 0, ord_minus = 0;  // sum of mu * ord for log and ord kernels
  QuadExtNumber product_plus, product_minus;  // log kernels: prod of the argument ^ mu
  int precision = 0;           // relative digits retained in the p-adic parts
};

struct IntegrationOptions {
  int threads = 1;
  int precision = 0;  // 0: largest word-size precision
  LogBranch branch;   // zero log_p means log_0
  std::vector<Ball> domain;  // empty: all of P^1(Q_p)
};

/// Distance from v_o of the target of the edge with ball b; the edge must point away from v_o.
int ball_depth(const Ball& b);

/// Sum over the depth-n covering (restricted to the domain) of mu(U) K(t_U).
Integral riemann_integrate(const HarmonicMeasure& mu, const Kernel& K, int depth,
                           const IntegrationOptions& opts = {});

struct OrdIntegral {
  SymbolValue value;
  int depth = 0;        // depth at which the value was computed
  int check_depth = 0;  // one refinement further, same value
};

OrdIntegral ord_integral(const HarmonicMeasure& mu, const QuadExtNumber& z1, const QuadExtNumber& z2);

Integral teitelbaum_log(const HarmonicMeasure& mu, const QuadExtNumber& z1, const QuadExtNumber& z2, int depth,
                        const IntegrationOptions& opts = {});

/// Distance in the tree between v_o and the vertex red(z).
int vertex_depth(const Vertex& v);

}  // namespace mockplectic
