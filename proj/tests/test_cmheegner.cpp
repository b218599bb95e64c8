#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mockplectic/cmheegner.hpp"

#include <random>
#include <set>

using namespace mockplectic;

namespace {

CurveData curve11() { return CurveData::make({0, -1, 1, -10, -20}, 11); }
CurveData curve37() { return CurveData::make({0, 0, 1, -1, 0}, 37); }

const CMContext& ctx11() {
  static CMContext c = CMContext::make(curve11());
  return c;
}

}  // namespace

TEST_CASE("complex lattice") {
  for (const auto& E : {curve11(), curve37()}) {
    auto L = complex_lattice(E);
    auto [c4, c6] = lattice_invariants(L);
    CHECK(std::abs(c4 - E.c4().get_d()) < 1e-8 * std::abs(E.c4().get_d()));
    CHECK(std::abs(c6 - E.c6().get_d()) < 1e-8 * std::abs(E.c6().get_d()));
    double disc = (c4 * c4 * c4 - c6 * c6) / 1728;
    CHECK(std::abs(disc - E.discriminant().get_d()) < 1e-8 * std::abs(E.discriminant().get_d()));
    CHECK((L.omega2 / L.omega1).imag() > 0);
    CHECK(L.distance(Complex(L.real_period, 0)) < 1e-12);
    CHECK(L.distance(L.imag_period) < 1e-12);
    CHECK(L.imag_period.real() == 0);
    auto L2 = complex_lattice(E, 1e-30);
    CHECK(std::abs(L2.real_period - L.real_period) < 1e-12 * L.real_period);
  }
  auto L37 = complex_lattice(curve37());
  CHECK(std::abs(L37.omega1.real() * L37.omega1.imag()) < 1e-24);
  CHECK(std::abs(L37.omega2.real() * L37.omega2.imag()) < 1e-24);
}

TEST_CASE("Phi, Fricke and periods") {
  const auto& ctx = ctx11();
  const auto& L = ctx.lattice;
  CHECK(ctx.fricke_sign == -1);
  CHECK(L.distance(static_cast<double>(ctx.torsion) * ctx.phi_zero) < 1e-12);
  CHECK(L.distance(ctx.phi_zero) > 0.1);
  for (double y : {0.2, 0.31, 0.5}) {
    Complex z(0.13, y);
    Complex Wz = -1.0 / (11.0 * z);
    Complex lhs = ctx.phi(z), rhs = -1.0 * (ctx.phi(Wz) - ctx.phi_zero);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
  HPoint z{mpq_class(-1, 12), mpq_class(1, 50), 3};
  auto hz = z.act(1, 0, 11, 1);
  CHECK(L.distance(ctx.phi(hz.value()) - ctx.phi(z.value())) < 1e-12);
  auto red = reduce_sl2z(HPoint{mpq_class(7, 13), mpq_class(1, 97), 67});
  CHECK(red.a * red.d - red.b * red.c == 1);
  CHECK(red.w.x * red.w.x + red.w.y * red.w.y * 67 >= 1);
  CHECK(abs(red.w.x) <= mpq_class(1, 2));
}

TEST_CASE("CM points") {
  auto t = CMPoint::principal(-67, 11);
  CHECK(t.A == 1);
  CHECK(t.B == 1);
  CHECK(t.C == 17);
  CHECK(reduction_point(t.tau_p) == Vertex::standard(11));
  CHECK_THROWS(CMPoint::principal(-7, 11));      // 11 splits
  CHECK_THROWS(CMPoint::make(1, 0, 5, 11, 20));  // class number 2
  CHECK_THROWS(CMPoint::make(2, 2, 2, 11, 20));
}

TEST_CASE("edge values") {
  const auto& ctx = ctx11();
  const auto& L = ctx.lattice;
  auto t = CMPoint::principal(-67, 11);
  auto balls = covering(11, 2);
  auto vals = edge_values(ctx, t.tau_inf, balls);
  std::set<long> distinct;
  for (size_t i = 0; i < vals.size(); ++i) {
    CHECK(vals[i].error_bound < 1e-8 * L.scale());
    auto rev = edge_value(ctx, t.tau_inf, balls[i].complement());
    CHECK(L.distance(rev.value + vals[i].value) < 1e-10);
    distinct.insert(std::lround(1e6 * vals[i].value.real()));
  }
  CHECK(distinct.size() > 10);

  for (auto g : {GammaElement(11, 2, 1, 1, 1), GammaElement(11, 11, 0, 0, mpq_class(1, 11)),
                 GammaElement(11, 1, mpq_class(1, 11), 0, 1)})
    for (size_t i = 0; i < balls.size(); i += 17) {
      auto a = edge_value(ctx, t.tau_inf, balls[i]);
      auto b = edge_value(ctx, t.tau_inf.act(g), g.act(balls[i]));
      CHECK(L.distance(a.value - b.value) < 1e-10);
    }
  CHECK(harmonicity_defect(ctx, t.tau_inf, 2) < 1e-6 * L.scale());
}

TEST_CASE("torus labels and pushforward") {
  auto t = CMPoint::principal(-67, 11);
  for (int n = 1; n <= 2; ++n) {
    auto ref = torus_label(t, reference_edge(11, n), n);
    CHECK(ref.key == TorusKey{1, 0});
    std::set<TorusKey> keys;
    for (const auto& b : covering(11, n)) {
      auto lab = torus_label(t, b, n);
      keys.insert(lab.key);
      CHECK(lab.alpha.norm().residue(n) == 1);
      auto M = torus_element_for(t, lab.alpha, n);
      CHECK(M.act(reference_edge(11, n)) == b);
    }
    CHECK(keys.size() == (n == 1 ? 12u : 132u));
    auto rep = pushforward_check(t, n);
    CHECK(rep.ok);
    CHECK(rep.edges == (n == 1 ? 12 : 132));
  }
  CHECK_THROWS(torus_label(t, Ball::affine(11, 3, 1), 2));

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> d(-50, 50);
  auto balls = covering(11, 2);
  for (int i = 0; i < 50; ++i) {
    long x = d(rng), y = d(rng);
    if (x % 11 == 0 && y % 11 == 0) continue;
    auto M = torus_matrix(t, x, y);
    auto chi = torus_character(t, x, y, 8);
    const auto& b = balls[static_cast<size_t>(i) % balls.size()];
    auto before = torus_label(t, b, 2), after = torus_label(t, M.act(b), 2);
    CHECK(torus_key(after.alpha - chi * before.alpha, 2) == TorusKey{0, 0});
  }
}

TEST_CASE("plectic invariant and Kolyvagin derivative") {
  const auto& ctx = ctx11();
  const auto& L = ctx.lattice;
  auto t = CMPoint::principal(-67, 11);
  auto Q1 = plectic_invariant(ctx, t, 1);
  auto Q2 = plectic_invariant(ctx, t, 2);
  CHECK(Q1.terms.size() == 12);
  CHECK(Q1.shadow_distance < 1e-6 * L.scale());
  CHECK(Q2.shadow_distance < 1e-6 * L.scale());
  CHECK(level_defect(Q2, Q1, 1, L) < 1e-6 * L.scale());
  auto Q3 = plectic_invariant(ctx, t, 3);
  CHECK(fiber_sums(Q2, 2).size() == 11);
  CHECK(level_defect(Q3, Q2, 2, L) < 1e-6 * L.scale());

  for (auto [x, y] : std::vector<std::pair<long, long>>{{3, 1}, {1, 5}, {-2, 7}}) {
    auto R = galois_rotation(Q2, t, x, y, L);
    CHECK(R.permutes);
    CHECK(R.shadow_distance < 1e-6 * L.scale());
  }

  auto K = kolyvagin_derivative(ctx, t, 1);
  CHECK(K.terms.size() == 12);
  CHECK(K.shadow_distance < 1e-6 * L.scale());
  std::set<TorusKey> seen;
  for (size_t i = 0; i < K.terms.size(); ++i) {
    seen.insert(K.terms[i].coefficient_key);
    CHECK(log_principal(angle(K.terms[i].coefficient)) == Q1.terms[i].coefficient);
  }
  CHECK(seen.size() == 12);
}

TEST_CASE("trace compatibility") {
  const auto& ctx = ctx11();
  auto t = CMPoint::principal(-67, 11);
  double r = trace_compat_check(ctx, t, 1);
  CHECK(r < 1e-5 * ctx.lattice.scale());
  double rs = trace_compat_check(ctx, t, 1, {true, 5.0});
  CHECK(rs <= 5 * r + 1e-12);

  auto E = curve37();
  auto c37 = CMContext::make(E);
  auto t37 = CMPoint::principal(-8, 37);
  CHECK(trace_compat_check(c37, t37, 1) < 1e-5 * c37.lattice.scale());
  CHECK(trace_compat_check(c37, t37, 1, {false, 1.0}) > 1e-2 * c37.lattice.scale());
}

TEST_CASE("thread count does not change values") {
  auto E = curve11();
  auto c1 = CMContext::make(E, 1), c4 = CMContext::make(E, 4);
  auto t = CMPoint::principal(-67, 11);
  auto a = plectic_invariant(c1, t, 2), b = plectic_invariant(c4, t, 2);
  REQUIRE(a.terms.size() == b.terms.size());
  for (size_t i = 0; i < a.terms.size(); ++i) CHECK(a.terms[i].value == b.terms[i].value);
  CHECK(a.shadow == b.shadow);
}
