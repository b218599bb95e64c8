#pragma once

#include "mockplectic/cmheegner.hpp"
#include "mockplectic/lfun.hpp"
#include "mockplectic/shpoint.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mockplectic {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

std::shared_ptr<const EigenSymbol> make_symbol(const CurveData& E);

/// T_l m = a_l m for l in {2,3,5,7,13}, U_p m = a_p m, path additivity and Gamma0(p)-invariance on
/// `cases` random inputs.
CheckResult check_modsym(const CurveData& E, const std::shared_ptr<const EigenSymbol>& S, int cases = 100,
                         unsigned seed = 1);

/// Zero sums at every vertex within `radius` of v_o and zero total mass, for mu[0,inf] and `symbols`
/// random rational symbols.
CheckResult check_harmonicity(const std::shared_ptr<const EigenSymbol>& S, int radius = 3, int symbols = 5,
                              unsigned seed = 2);

/// mu[0,inf](Z_p^x) = (1 - a_p) mu[0,inf](Z_p).
CheckResult check_interpolation(const CurveData& E, const std::shared_ptr<const EigenSymbol>& S);

CheckResult check_tate(const CurveData& E, int digits = 15);

/// Residual >= n - 2 at each depth, non-decreasing, last above first; the deepest run under 2 minutes.
CheckResult check_mtt(const CurveData& E, const std::shared_ptr<const EigenSymbol>& S,
                      const std::vector<int>& depths = {2, 3, 4}, int threads = 1);

/// Depth n vs n + 1 for the log-linear (L_p') and log-cross-ratio (J) kernels.
CheckResult check_riemann(const std::shared_ptr<const EigenSymbol>& S, int from = 2, int to = 5, int threads = 1);

CheckResult check_sh_consistency(const CurveData& E, const std::shared_ptr<const EigenSymbol>& S,
                                 const RMPoint& tau, int depth = 5, int threads = 1);

struct RecognitionCheck {
  CheckResult result;
  StarkHeegnerPoint point;
  Recognition recognition;
};

RecognitionCheck check_sh_recognition(const CurveData& E, const std::shared_ptr<const EigenSymbol>& S,
                                      const RMPoint& tau, int depth, const std::vector<long>& heights,
                                      int threads = 1);

CheckResult check_cm_harmonicity(const CMContext& ctx, const CMPoint& tau, double tolerance = 1e-5);

CheckResult check_trace(const CMContext& ctx, const CMPoint& tau, int n = 1, double tolerance = 1e-4);

CheckResult check_pushforward(const CMContext& ctx, const CMPoint& tau, double tolerance = 1e-6);

/// First D in the class-number-one list with p inert, or 0.
long default_cm_discriminant(long p);

}  // namespace mockplectic
