#include "mockplectic/modsym.hpp"

#include <array>
#include <numeric>
#include <tuple>

namespace mockplectic {

namespace {

long modp(long a, long p) {
  long r = a % p;
  return r < 0 ? r + p : r;
}

long modp(const mpz_class& a, long p) {
  return static_cast<long>(mpz_fdiv_ui(a.get_mpz_t(), static_cast<unsigned long>(p)));
}

long inv_mod(long a, long p) {
  long t = 0, nt = 1, r = p, nr = modp(a, p);
  while (nr != 0) {
    long q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  return modp(t, p);
}

Cusp act_upper(long alpha, long beta, long delta, const Cusp& x) {
  if (x.is_infinity()) return x;
  return Cusp::make(alpha * x.num + beta * x.den, delta * x.den);
}

std::vector<mpq_class> primitive_scaled(const std::vector<mpq_class>& v) {
  mpz_class l = 1, g = 0;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<mpq_class> w(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    w[i] = v[i] * l;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), w[i].get_num_mpz_t());
  }
  if (g != 0)
    for (auto& x : w) x /= g;
  return w;
}

}  // namespace

long ManinBasis::index(long c, long d) const {
  c = modp(c, p);
  d = modp(d, p);
  if (c == 0) return p;
  return d * inv_mod(c, p) % p;
}

std::pair<long, long> ManinBasis::symbol(long i) const {
  if (i == p) return {0, 1};
  return {1, i};
}

std::vector<std::vector<mpq_class>> nullspace(std::vector<std::vector<mpq_class>> rows, size_t ncols) {
  std::vector<long> pivot_col;
  size_t r = 0;
  for (size_t c = 0; c < ncols && r < rows.size(); ++c) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    mpq_class inv = 1 / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      mpq_class f = rows[i][c];
      for (size_t k = c; k < ncols; ++k) rows[i][k] -= f * rows[r][k];
    }
    pivot_col.push_back(static_cast<long>(c));
    ++r;
  }
  std::vector<bool> is_pivot(ncols, false);
  for (long c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<mpq_class>> basis;
  for (size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<mpq_class> v(ncols, 0);
    v[f] = 1;
    for (size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -rows[i][f];
    basis.push_back(v);
  }
  return basis;
}

ManinBasis build_basis(long p) {
  if (p < 2 || !is_prime(p)) throw std::invalid_argument("build_basis: p must be prime");
  ManinBasis B;
  B.p = p;
  const long n = B.size();
  for (long i = 0; i < n; ++i) {
    auto [c, d] = B.symbol(i);
    std::vector<mpq_class> two(n, 0), three(n, 0);
    two[i] += 1;
    two[B.index(-d, c)] += 1;
    three[i] += 1;
    three[B.index(d, -c - d)] += 1;
    three[B.index(-c - d, c)] += 1;
    B.relations.push_back(two);
    B.relations.push_back(three);
  }
  B.solutions = nullspace(B.relations, static_cast<size_t>(n));
  return B;
}

std::vector<long> manin_path(long p, const Cusp& x) {
  std::vector<long> out(static_cast<size_t>(p + 1), 0);
  if (x.is_infinity()) return out;
  ManinBasis B;
  B.p = p;
  mpz_class a = x.num, b = x.den;
  long qm2 = 1, qm1 = 0;
  long sign = -1;
  while (b != 0) {
    mpz_class ak;
    mpz_fdiv_q(ak.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    long qk = modp(modp(ak, p) * qm1 + qm2, p);
    out[B.index(qk, sign * qm1)] += 1;
    mpz_class rem = a - ak * b;
    a = b;
    b = rem;
    sign = -sign;
    qm2 = qm1;
    qm1 = qk;
  }
  return out;
}

std::vector<long> manin_path_ceiling(long p, const Cusp& x) {
  std::vector<long> out(static_cast<size_t>(p + 1), 0);
  ManinBasis B;
  B.p = p;
  long c = 0, d = 1;  // bottom row of g
  mpz_class a = x.num, b = x.den;
  while (b != 0) {
    mpz_class a0;
    mpz_cdiv_q(a0.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    // h0 = g T^a0
    long hc = c, hd = modp(c * modp(a0, p) + d, p);
    out[B.index(hc, hd)] -= 1;
    mpz_class den = a0 * b - a;
    if (den == 0) break;
    a = b;
    b = den;
    // h = h0 S
    c = hd;
    d = modp(-hc, p);
  }
  return out;
}

std::vector<std::vector<long>> hecke_matrix(long p, long l) {
  ManinBasis B;
  B.p = p;
  const long n = B.size();
  std::vector<std::array<long, 3>> deltas;
  for (long j = 0; j < l; ++j) deltas.push_back({1, j, l});
  if (l != p) deltas.push_back({l, 0, 1});
  std::vector<std::vector<long>> M(static_cast<size_t>(n), std::vector<long>(static_cast<size_t>(n), 0));
  for (long i = 0; i < n; ++i) {
    auto [c, d] = B.symbol(i);
    // representative [[a, b], [c, d]] in SL_2(Z)
    long a = c == 0 ? 1 : 0, b = c == 0 ? 0 : -1;
    Cusp r = d == 0 ? Cusp::infinity() : Cusp::make(b, d);
    Cusp s = c == 0 ? Cusp::infinity() : Cusp::make(a, c);
    for (const auto& dl : deltas) {
      auto ps = manin_path(p, act_upper(dl[0], dl[1], dl[2], s));
      auto pr = manin_path(p, act_upper(dl[0], dl[1], dl[2], r));
      for (long k = 0; k < n; ++k) M[i][k] += ps[k] - pr[k];
    }
  }
  return M;
}

std::vector<mpq_class> hecke_apply(long p, long l, const std::vector<mpq_class>& phi) {
  auto M = hecke_matrix(p, l);
  std::vector<mpq_class> out(phi.size(), 0);
  for (size_t i = 0; i < phi.size(); ++i)
    for (size_t k = 0; k < phi.size(); ++k) out[i] += M[i][k] * phi[k];
  return out;
}

std::vector<mpq_class> star_apply(long p, const std::vector<mpq_class>& phi) {
  ManinBasis B;
  B.p = p;
  std::vector<mpq_class> out(phi.size());
  for (long i = 0; i < B.size(); ++i) {
    auto [c, d] = B.symbol(i);
    out[i] = phi[B.index(-c, d)];
  }
  return out;
}

EigenSymbol eigen_symbol(const CurveData& E, const ManinBasis& basis, long bound) {
  const long p = basis.p;
  const long n = basis.size();
  if (p != E.p) throw CurveError("Manin basis built for a different prime");
  EigenSymbol M;
  M.p = p;
  M.ap = E.ap;
  std::vector<std::vector<mpq_class>> hecke_rows;
  for (long l : primes_up_to(bound)) {
    if (l == p) continue;
    long al = ap_from_curve(E, l);
    M.eigenvalues[l] = al;
    auto T = hecke_matrix(p, l);
    for (long i = 0; i < n; ++i) {
      std::vector<mpq_class> row(static_cast<size_t>(n));
      for (long k = 0; k < n; ++k) row[k] = T[i][k] - (i == k ? al : 0);
      hecke_rows.push_back(row);
    }
  }
  M.eigenvalues[p] = E.ap;
  ManinBasis star_helper;
  star_helper.p = p;
  for (int sign : {1, -1}) {
    auto rows = basis.relations;
    rows.insert(rows.end(), hecke_rows.begin(), hecke_rows.end());
    for (long i = 0; i < n; ++i) {
      auto [c, d] = star_helper.symbol(i);
      std::vector<mpq_class> row(static_cast<size_t>(n), 0);
      row[star_helper.index(-c, d)] += 1;
      row[i] -= sign;
      rows.push_back(row);
    }
    auto ns = nullspace(rows, static_cast<size_t>(n));
    if (ns.size() != 1)
      throw CurveError("eigenspace of sign " + std::to_string(sign) + " has dimension " + std::to_string(ns.size()));
    auto v = primitive_scaled(ns[0]);
    std::vector<long> w(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) w[i] = v[i].get_num().get_si();
    auto path0 = manin_path(p, Cusp::rational(0));
    long at_zero = 0;  // m[0, inf] = -m[inf, 0]
    for (long i = 0; i < n; ++i) at_zero -= path0[i] * w[i];
    long first = 0;
    for (long x : w)
      if (x != 0) {
        first = x;
        break;
      }
    bool flip = sign == 1 && at_zero != 0 ? at_zero < 0 : first < 0;
    if (flip)
      for (auto& x : w) x = -x;
    (sign == 1 ? M.plus : M.minus) = w;
  }
  for (const auto* phi : {&M.plus, &M.minus}) {
    std::vector<mpq_class> q(phi->begin(), phi->end());
    auto up = hecke_apply(p, p, q);
    for (long i = 0; i < n; ++i)
      if (up[i] != E.ap * q[i]) throw CurveError("U_p eigenvalue does not match a_p");
  }
  M.prepare();
  return M;
}

void EigenSymbol::prepare() {
  ManinBasis B;
  B.p = p;
  plus_cd_.assign(static_cast<size_t>(p * p), 0);
  minus_cd_.assign(static_cast<size_t>(p * p), 0);
  for (long c = 0; c < p; ++c)
    for (long d = 0; d < p; ++d) {
      if (c == 0 && d == 0) continue;
      long i = B.index(c, d);
      plus_cd_[c * p + d] = plus[i];
      minus_cd_[c * p + d] = minus[i];
    }
}

SymbolValue EigenSymbol::eval(const Cusp& r, const Cusp& s) const {
  auto ps = manin_path(p, s), pr = manin_path(p, r);
  SymbolValue v{0, 0};
  for (long i = 0; i <= p; ++i) {
    long k = ps[i] - pr[i];
    if (k == 0) continue;
    v.plus += k * plus[i];
    v.minus += k * minus[i];
  }
  return v;
}

void EigenSymbol::eval_inf(__int128 a, __int128 b, long& out_plus, long& out_minus) const {
  out_plus = 0;
  out_minus = 0;
  const __int128 P = p;
  long qm2 = 1, qm1 = 0;
  bool neg = true;
  while (b != 0) {
    __int128 ak = a / b;
    __int128 rem = a - ak * b;
    if (rem < 0) {
      --ak;
      rem += b;
    }
    long akm = static_cast<long>(ak % P);
    if (akm < 0) akm += p;
    long qk = (akm * qm1 + qm2) % p;
    long d = neg ? (qm1 == 0 ? 0 : p - qm1) : qm1;
    out_plus += plus_cd_[qk * p + d];
    out_minus += minus_cd_[qk * p + d];
    a = b;
    b = rem;
    neg = !neg;
    qm2 = qm1;
    qm1 = qk;
  }
}

void EigenSymbol::eval_fast(__int128 rn, __int128 rd, __int128 sn, __int128 sd, long& out_plus,
                            long& out_minus) const {
  long rp, rm, sp, sm;
  if (rd < 0) {
    rn = -rn;
    rd = -rd;
  }
  if (sd < 0) {
    sn = -sn;
    sd = -sd;
  }
  eval_inf(rn, rd, rp, rm);
  eval_inf(sn, sd, sp, sm);
  out_plus = sp - rp;
  out_minus = sm - rm;
}

}  // namespace mockplectic
