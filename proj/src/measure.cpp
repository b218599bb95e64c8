#include "mockplectic/measure.hpp"

#include "fastquad.hpp"

#include <mutex>
#include <thread>

namespace mockplectic {

using detail::FastQuad;
using detail::FastRing;
using detail::i128;
using detail::u64;
using detail::UnitProduct;

namespace {

i128 to_i128(const mpz_class& x) {
  if (mpz_sizeinbase(x.get_mpz_t(), 2) > 120) throw std::overflow_error("cusp too large for the fast path");
  mpz_class hi = x >> 64;
  mpz_class lo = x - (hi << 64);
  return (static_cast<i128>(hi.get_si()) << 64) + static_cast<i128>(static_cast<u64>(mpz_class(lo).get_ui()));
}

i128 ipow(long p, int e) {
  i128 r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

HarmonicMeasure::HarmonicMeasure(std::shared_ptr<const EigenSymbol> symbol, Cusp r, Cusp s)
    : symbol_(std::move(symbol)), r_(std::move(r)), s_(std::move(s)) {
  rn_ = to_i128(r_.num);
  rd_ = to_i128(r_.den);
  sn_ = to_i128(s_.num);
  sd_ = to_i128(s_.den);
}

SymbolValue HarmonicMeasure::measure(const Ball& U) const {
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(U);
    if (it != memo_.end()) return it->second;
  }
  auto red = reduce_edge(OrientedEdge{U});
  SymbolValue v = symbol_->eval(red.gamma.act(r_), red.gamma.act(s_));
  if (red.orientation < 0) v = -v;
  std::unique_lock lock(mutex_);
  memo_.emplace(U, v);
  return v;
}

void HarmonicMeasure::poison(const Ball& U, const SymbolValue& value) const {
  std::unique_lock lock(mutex_);
  memo_[U] = value;
}

void HarmonicMeasure::measure_fast(i128 C, int K, int level, bool coaffine, long& plus, long& minus) const {
  const long p = symbol_->p;
  int f = level >= 0 ? level / 2 : -((-level + 1) / 2);
  int e = K + 2 * f;
  // x = (r - C/p^K) / p^(2f) as num/den
  auto transform = [&](i128 n, i128 d, i128& xn, i128& xd) {
    if (d == 0) {
      xn = level - 2 * f == 1 ? 0 : 1;
      xd = level - 2 * f == 1 ? 1 : 0;
      return;
    }
    i128 num = n * ipow(p, K) - C * d;
    i128 den = d;
    if (e >= 0) {
      den *= ipow(p, e);
    } else {
      num *= ipow(p, -e);
    }
    if (level - 2 * f == 1) {
      // S: x -> -1/x
      if (num == 0) {
        xn = 1;
        xd = 0;
        return;
      }
      i128 t = num;
      num = -den;
      den = t;
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    xn = num;
    xd = den;
  };
  i128 xrn, xrd, xsn, xsd;
  transform(rn_, rd_, xrn, xrd);
  transform(sn_, sd_, xsn, xsd);
  long rp, rm, sp, sm;
  symbol_->eval_inf(xrn, xrd, rp, rm);
  symbol_->eval_inf(xsn, xsd, sp, sm);
  plus = sp - rp;
  minus = sm - rm;
  bool negate = (level - 2 * f == 0) != coaffine;
  if (negate) {
    plus = -plus;
    minus = -minus;
  }
}

bool HarmonicMeasure::check_harmonic(const Vertex& v) const {
  SymbolValue total{0, 0};
  for (const auto& e : edges_at(v)) total = total + measure(e.ball);
  return total == SymbolValue{0, 0};
}

// ---------------------------------------------------------------------------

Kernel Kernel::log_cross_ratio(const QuadExtNumber& z1, const QuadExtNumber& z2) {
  Kernel k;
  k.kind = KernelKind::LogCrossRatio;
  k.z1 = z1;
  k.z2 = z2;
  return k;
}

Kernel Kernel::log_linear(const QuadExtNumber& z) {
  Kernel k;
  k.kind = KernelKind::LogLinear;
  k.z1 = z;
  return k;
}

Kernel Kernel::power_angle(long exponent) {
  Kernel k;
  k.kind = KernelKind::PowerAngle;
  k.exponent = exponent;
  return k;
}

Kernel Kernel::ord_cross_ratio(const QuadExtNumber& z1, const QuadExtNumber& z2) {
  Kernel k;
  k.kind = KernelKind::OrdCrossRatio;
  k.z1 = z1;
  k.z2 = z2;
  return k;
}

Kernel Kernel::coset_indicator(const Ball& b) {
  Kernel k;
  k.kind = KernelKind::CosetIndicator;
  k.ball = b;
  return k;
}

int vertex_depth(const Vertex& v) {
  mpq_class c = v.center();
  int l = std::min(0, v.level);
  if (c != 0) l = std::min(l, valuation_of(c, v.p));
  return -l + (v.level - l);
}

int ball_depth(const Ball& b) {
  OrientedEdge e{b};
  int ds = vertex_depth(e.source()), dt = vertex_depth(e.target());
  if (dt != ds + 1) throw std::invalid_argument("domain ball's edge does not point away from v_o");
  return dt;
}

namespace {

struct Leaf {
  i128 C;
  int level;
  bool coaffine;
};

struct Accumulator {
  long ord_plus = 0, ord_minus = 0;
  UnitProduct num_plus, den_plus, num_minus, den_minus;
  u64 sum_a_plus = 0, sum_b_plus = 0, sum_a_minus = 0, sum_b_minus = 0;
  long count_plus = 0, count_minus = 0;
  int loss = 0;
  size_t balls = 0;
};

void mul_power(const FastRing& R, UnitProduct& num, UnitProduct& den, const FastQuad& y, long mu) {
  if (mu == 0) return;
  UnitProduct& target = mu > 0 ? num : den;
  long e = mu > 0 ? mu : -mu;
  if (e <= 4) {
    for (long i = 0; i < e; ++i) detail::mul_into(R, target, y.a, y.b);
    return;
  }
  UnitProduct base{y.a, y.b}, acc;
  while (e > 0) {
    if (e & 1) detail::mul_into(R, acc, base.a, base.b);
    detail::mul_into(R, base, base.a, base.b);
    e >>= 1;
  }
  detail::mul_into(R, target, acc.a, acc.b);
}

int working_precision(long p, const Kernel& K, const IntegrationOptions& opts) {
  int n = opts.precision > 0 ? opts.precision : FastRing::max_precision(p);
  n = std::min(n, FastRing::max_precision(p));
  for (const auto* z : {&K.z1, &K.z2})
    if (!z->is_zero() && z->prime() == p) n = std::min(n, z->precision());
  return n;
}

class Integrator {
 public:
  Integrator(const HarmonicMeasure& mu, const Kernel& K, int depth, const IntegrationOptions& opts)
      : mu_(mu), K_(K), depth_(depth), opts_(opts), R_(mu.prime(), working_precision(mu.prime(), K, opts)) {
    p_ = mu.prime();
    if (K.kind == KernelKind::LogCrossRatio || K.kind == KernelKind::OrdCrossRatio) {
      z1_ = detail::from_quad(R_, K.z1.with_precision(R_.N));
      z2_ = detail::from_quad(R_, K.z2.with_precision(R_.N));
    } else if (K.kind == KernelKind::LogLinear && !K.z1.is_zero()) {
      z1_ = detail::from_quad(R_, K.z1.with_precision(R_.N));
    }
    if (K.kind == KernelKind::LogLinear || K.kind == KernelKind::PowerAngle) build_angle_table();
  }

  Integral run() {
    std::vector<std::pair<Ball, int>> roots;
    if (opts_.domain.empty()) {
      for (const auto& e : edges_at(Vertex::standard(p_))) roots.push_back({e.ball, 1});
    } else {
      for (const auto& b : opts_.domain) roots.push_back({b, ball_depth(b)});
    }
    int max_den = 0;
    for (const auto& [b, d] : roots) {
      if (d > depth_) throw std::invalid_argument("domain ball deeper than the integration depth");
      max_den = std::max(max_den, b.center_den_exp);
    }
    Kexp_ = depth_ + 1 + max_den;
    // frontier of subtrees, expanded until there is enough work to share
    std::vector<std::pair<Leaf, int>> work;
    for (const auto& [b, d] : roots) {
      i128 C = to_i128(b.center_num) * ipow(p_, Kexp_ - b.center_den_exp);
      work.push_back({Leaf{C, b.level, b.coaffine}, depth_ - d});
    }
    int threads = std::max(1, opts_.threads);
    while (threads > 1 && work.size() < static_cast<size_t>(threads) * 8) {
      std::vector<std::pair<Leaf, int>> next;
      bool grew = false;
      for (const auto& [leaf, rem] : work) {
        if (rem == 0) {
          next.push_back({leaf, rem});
          continue;
        }
        grew = true;
        for_children(leaf, [&](const Leaf& c) { next.push_back({c, rem - 1}); });
      }
      work = std::move(next);
      if (!grew) break;
    }
    std::vector<Accumulator> accs(static_cast<size_t>(threads));
    std::vector<std::string> errors(static_cast<size_t>(threads));
    auto worker = [&](int t) {
      try {
        for (size_t i = static_cast<size_t>(t); i < work.size(); i += static_cast<size_t>(threads))
          descend(work[i].first, work[i].second, accs[t]);
      } catch (const std::exception& ex) {
        errors[t] = ex.what();
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
      if (!e.empty()) throw PadicError(e);
    Accumulator total;
    for (const auto& a : accs) merge(total, a);
    return finish(total);
  }

 private:
  template <class F>
  void for_children(const Leaf& b, F&& f) const {
    if (!b.coaffine) {
      i128 step = ipow(p_, b.level + Kexp_);
      for (long j = 0; j < p_; ++j) f(Leaf{b.C + j * step, b.level + 1, false});
    } else {
      f(Leaf{b.C, b.level - 1, true});
      i128 step = ipow(p_, b.level - 1 + Kexp_);
      for (long j = 1; j < p_; ++j) f(Leaf{b.C + j * step, b.level, false});
    }
  }

  void descend(const Leaf& b, int remaining, Accumulator& acc) const {
    if (remaining == 0) {
      visit(b, acc);
      return;
    }
    for_children(b, [&](const Leaf& c) { descend(c, remaining - 1, acc); });
  }

  FastQuad rational_point(i128 C) const {
    FastQuad y;
    int v = 0;
    while (C % p_ == 0) {
      C /= p_;
      ++v;
    }
    y.v = v - Kexp_;
    y.a = R_.reduce(C);
    y.b = 0;
    return y;
  }

  void visit(const Leaf& b, Accumulator& acc) const {
    long mp, mm;
    mu_.measure_fast(b.C, Kexp_, b.level, b.coaffine, mp, mm);
    ++acc.balls;
    if (mp == 0 && mm == 0) return;
    switch (K_.kind) {
      case KernelKind::LogCrossRatio:
      case KernelKind::OrdCrossRatio: {
        if (b.coaffine) return;  // kernel equals 1 at infinity
        FastQuad y2 = detail::sub_rational(R_, z2_, b.C, Kexp_);
        FastQuad y1 = detail::sub_rational(R_, z1_, b.C, Kexp_);
        long dv = y2.v - y1.v;
        acc.ord_plus += mp * dv;
        acc.ord_minus += mm * dv;
        if (K_.kind == KernelKind::OrdCrossRatio) return;
        acc.loss = std::max({acc.loss, y1.loss, y2.loss});
        mul_power(R_, acc.num_plus, acc.den_plus, y2, mp);
        mul_power(R_, acc.den_plus, acc.num_plus, y1, mp);
        mul_power(R_, acc.num_minus, acc.den_minus, y2, mm);
        mul_power(R_, acc.den_minus, acc.num_minus, y1, mm);
        return;
      }
      case KernelKind::LogLinear: {
        if (b.coaffine) throw PadicError("log-linear kernel is singular at infinity");
        FastQuad y;
        if (K_.z1.is_zero()) {
          if (b.C == 0) throw PadicError("log-linear kernel is singular on a covering ball");
          y = rational_point(b.C);
        } else {
          y = detail::sub_rational(R_, z1_, b.C, Kexp_);
        }
        acc.loss = std::max(acc.loss, y.loss);
        acc.ord_plus += mp * y.v;
        acc.ord_minus += mm * y.v;
        mul_power(R_, acc.num_plus, acc.den_plus, y, mp);
        mul_power(R_, acc.num_minus, acc.den_minus, y, mm);
        return;
      }
      case KernelKind::PowerAngle: {
        if (b.coaffine || b.C == 0) throw PadicError("power-angle kernel is singular on a covering ball");
        FastQuad t = rational_point(b.C);
        u64 w = R_.mul(t.a, omega_inv_[t.a % static_cast<u64>(p_)]);
        long e = K_.exponent;
        if (e < 0) {
          w = inverse_unit(w);
          e = -e;
        }
        u64 val = 1, base = w;
        while (e > 0) {
          if (e & 1) val = R_.mul(val, base);
          base = R_.mul(base, base);
          e >>= 1;
        }
        auto add_scaled = [&](u64& sum, long m) {
          u64 term = R_.mul(val, R_.reduce(m < 0 ? -static_cast<i128>(m) : m));
          sum = m < 0 ? R_.sub(sum, term) : R_.add(sum, term);
        };
        add_scaled(acc.sum_a_plus, mp);
        add_scaled(acc.sum_a_minus, mm);
        return;
      }
      case KernelKind::CosetIndicator: {
        bool in;
        if (b.coaffine) {
          in = K_.ball.contains(Cusp::infinity());
        } else {
          mpz_class num = 0;
          i128 C = b.C;
          bool neg = C < 0;
          if (neg) C = -C;
          mpz_class hi(static_cast<unsigned long>(static_cast<u64>(C >> 64)));
          num = (hi << 64) + mpz_class(static_cast<unsigned long>(static_cast<u64>(C)));
          if (neg) num = -num;
          mpq_class t(num, prime_power(p_, Kexp_));
          t.canonicalize();
          in = K_.ball.contains(Cusp::rational(t));
        }
        if (in) {
          acc.count_plus += mp;
          acc.count_minus += mm;
        }
        return;
      }
    }
  }

  u64 inverse_unit(u64 x) const {
    i128 t = 0, nt = 1, r = static_cast<i128>(R_.M), nr = x;
    while (nr != 0) {
      i128 q = r / nr;
      i128 tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    return R_.reduce(t);
  }

  void build_angle_table() {
    omega_inv_.assign(static_cast<size_t>(p_), 0);
    for (long a = 1; a < p_; ++a) {
      auto w = teichmuller(PadicNumber::from_integer(p_, a, R_.N));
      auto wi = w.inverse();
      omega_inv_[a] = static_cast<u64>(mpz_class(wi.unit() % mpz_class(static_cast<unsigned long>(R_.M))).get_ui());
    }
  }

  void merge(Accumulator& into, const Accumulator& a) const {
    into.ord_plus += a.ord_plus;
    into.ord_minus += a.ord_minus;
    detail::mul_into(R_, into.num_plus, a.num_plus.a, a.num_plus.b);
    detail::mul_into(R_, into.den_plus, a.den_plus.a, a.den_plus.b);
    detail::mul_into(R_, into.num_minus, a.num_minus.a, a.num_minus.b);
    detail::mul_into(R_, into.den_minus, a.den_minus.a, a.den_minus.b);
    into.sum_a_plus = R_.add(into.sum_a_plus, a.sum_a_plus);
    into.sum_b_plus = R_.add(into.sum_b_plus, a.sum_b_plus);
    into.sum_a_minus = R_.add(into.sum_a_minus, a.sum_a_minus);
    into.sum_b_minus = R_.add(into.sum_b_minus, a.sum_b_minus);
    into.count_plus += a.count_plus;
    into.count_minus += a.count_minus;
    into.loss = std::max(into.loss, a.loss);
    into.balls += a.balls;
  }

  QuadExtNumber log_of(const UnitProduct& num, const UnitProduct& den, long ord, int prec) const {
    auto n = detail::to_quad(R_, 0, num.a, num.b, R_.N - prec);
    auto d = detail::to_quad(R_, 0, den.a, den.b, R_.N - prec);
    QuadExtNumber value = log_principal(angle(n / d));
    if (!opts_.branch.log_p.is_zero() && ord != 0) {
      auto k = QuadExtNumber::from_padic(PadicNumber::from_integer(p_, ord, prec + 4));
      value = value + k * opts_.branch.log_p;
    }
    return value;
  }

  QuadExtNumber product_of(const UnitProduct& num, const UnitProduct& den, long ord, int prec) const {
    auto n = detail::to_quad(R_, 0, num.a, num.b, R_.N - prec);
    auto d = detail::to_quad(R_, 0, den.a, den.b, R_.N - prec);
    return QuadExtNumber::from_parts(p_, static_cast<int>(ord), 1, 0, prec) * (n / d);
  }

  QuadExtNumber integer_value(long n) const {
    if (n == 0) return QuadExtNumber::zero(p_, R_.N);
    return QuadExtNumber::from_padic(PadicNumber::from_integer(p_, n, R_.N));
  }

  QuadExtNumber sum_value(u64 a, u64 b) const {
    if (a == 0 && b == 0) return QuadExtNumber::zero(p_, R_.N);
    int j = std::min(detail::vp64(a, p_, R_.N), detail::vp64(b, p_, R_.N));
    return detail::to_quad(R_, j, a / R_.pow[j], b / R_.pow[j], j);
  }

  Integral finish(const Accumulator& a) const {
    Integral out;
    out.depth = depth_;
    out.balls = a.balls;
    out.ord_plus = a.ord_plus;
    out.ord_minus = a.ord_minus;
    int prec = R_.N - a.loss;
    out.precision = prec;
    switch (K_.kind) {
      case KernelKind::LogCrossRatio:
      case KernelKind::LogLinear:
        out.plus = log_of(a.num_plus, a.den_plus, a.ord_plus, prec);
        out.minus = log_of(a.num_minus, a.den_minus, a.ord_minus, prec);
        out.product_plus = product_of(a.num_plus, a.den_plus, a.ord_plus, prec);
        out.product_minus = product_of(a.num_minus, a.den_minus, a.ord_minus, prec);
        break;
      case KernelKind::OrdCrossRatio:
        out.plus = integer_value(a.ord_plus);
        out.minus = integer_value(a.ord_minus);
        break;
      case KernelKind::PowerAngle:
        out.plus = sum_value(a.sum_a_plus, a.sum_b_plus);
        out.minus = sum_value(a.sum_a_minus, a.sum_b_minus);
        break;
      case KernelKind::CosetIndicator:
        out.plus = integer_value(a.count_plus);
        out.minus = integer_value(a.count_minus);
        out.ord_plus = a.count_plus;
        out.ord_minus = a.count_minus;
        break;
    }
    return out;
  }

  const HarmonicMeasure& mu_;
  const Kernel& K_;
  int depth_;
  const IntegrationOptions& opts_;
  FastRing R_;
  long p_ = 0;
  int Kexp_ = 0;
  FastQuad z1_, z2_;
  std::vector<u64> omega_inv_;
};

}  // namespace

Integral riemann_integrate(const HarmonicMeasure& mu, const Kernel& K, int depth, const IntegrationOptions& opts) {
  if (depth < 1) throw std::invalid_argument("integration depth must be >= 1");
  Integrator I(mu, K, depth, opts);
  return I.run();
}

Integral teitelbaum_log(const HarmonicMeasure& mu, const QuadExtNumber& z1, const QuadExtNumber& z2, int depth,
                        const IntegrationOptions& opts) {
  return riemann_integrate(mu, Kernel::log_cross_ratio(z1, z2), depth, opts);
}

OrdIntegral ord_integral(const HarmonicMeasure& mu, const QuadExtNumber& z1, const QuadExtNumber& z2) {
  OrdIntegral out;
  int d = std::max(vertex_depth(reduction_point(z1)), vertex_depth(reduction_point(z2))) + 1;
  auto K = Kernel::ord_cross_ratio(z1, z2);
  auto at = [&](int depth) {
    auto I = riemann_integrate(mu, K, depth);
    return SymbolValue{I.ord_plus, I.ord_minus};
  };
  SymbolValue prev = at(d);
  for (int extra = 0; extra < 6; ++extra) {
    SymbolValue next = at(d + 1);
    if (next == prev) {
      out.value = prev;
      out.depth = d;
      out.check_depth = d + 1;
      return out;
    }
    prev = next;
    ++d;
  }
  throw PadicError("ord integral did not stabilize");
}

}  // namespace mockplectic
