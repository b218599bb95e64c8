#include "mockplectic/modsym.hpp"
#include "mockplectic/weierstrass.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

namespace mockplectic {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<long> primes_up_to(long n) {
  std::vector<long> out;
  std::vector<bool> sieve(static_cast<size_t>(std::max(n + 1, 2L)), true);
  for (long i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (long j = i * i; j <= n; j += i) sieve[j] = false;
  }
  return out;
}

mpz_class CurveData::b2() const { return a1 * a1 + 4 * a2; }
mpz_class CurveData::b4() const { return 2 * a4 + a1 * a3; }
mpz_class CurveData::b6() const { return a3 * a3 + 4 * a6; }
mpz_class CurveData::b8() const {
  return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}
mpz_class CurveData::c4() const { return b2() * b2() - 24 * b4(); }
mpz_class CurveData::c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
mpz_class CurveData::discriminant() const {
  mpz_class B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
  return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}

std::string CurveData::label() const {
  return a1.get_str() + "," + a2.get_str() + "," + a3.get_str() + "," + a4.get_str() + "," + a6.get_str();
}

namespace {

long mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

long mod(const mpz_class& a, long m) {
  return static_cast<long>(mpz_fdiv_ui(a.get_mpz_t(), static_cast<unsigned long>(m)));
}

long powmod(long b, long e, long m) {
  __int128 r = 1, x = mod(b, m);
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<long>(r);
}

int legendre(long a, long p) {
  a = mod(a, p);
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

long count_points(const CurveData& E, long l) {
  long A1 = mod(E.a1, l), A2 = mod(E.a2, l), A3 = mod(E.a3, l), A4 = mod(E.a4, l), A6 = mod(E.a6, l);
  long n = 1;
  for (long x = 0; x < l; ++x) {
    long h = (A1 * x + A3) % l;
    long f = ((x * x % l * x) % l + A2 * x % l * x % l + A4 * x + A6) % l;
    if (l == 2) {
      for (long y = 0; y < 2; ++y) n += (y * y + h * y - f) % 2 == 0 ? 1 : 0;
    } else {
      n += 1 + legendre(h * h + 4 * f, l);
    }
  }
  return n;
}

// Integer roots of X^3 + A X + C by exact bisection on monotone pieces.
std::vector<mpz_class> integer_roots(const mpz_class& A, const mpz_class& C) {
  auto f = [&](const mpz_class& x) { return mpz_class(x * x * x + A * x + C); };
  mpz_class bound = 1 + std::max(abs(A), abs(C));
  std::vector<mpz_class> cuts{-bound};
  if (A < 0) {
    mpz_class r;
    mpz_class t = -A / 3;
    mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
    cuts.push_back(-r - 1);
    cuts.push_back(-r);
    cuts.push_back(-r + 1);
    cuts.push_back(r - 1);
    cuts.push_back(r);
    cuts.push_back(r + 1);
  }
  cuts.push_back(bound);
  std::sort(cuts.begin(), cuts.end());
  std::set<mpz_class> roots;
  for (const auto& c : cuts)
    if (f(c) == 0) roots.insert(c);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    mpz_class lo = cuts[i], hi = cuts[i + 1];
    int slo = sgn(f(lo)), shi = sgn(f(hi));
    if (slo == 0 || shi == 0 || slo == shi) continue;
    while (hi - lo > 1) {
      mpz_class mid = (lo + hi) / 2;
      int sm = sgn(f(mid));
      if (sm == 0) {
        roots.insert(mid);
        break;
      }
      if (sm == slo) lo = mid; else hi = mid;
    }
  }
  return {roots.begin(), roots.end()};
}

}  // namespace

long ap_from_curve(const CurveData& E, long l) {
  if (!is_prime(l)) throw std::invalid_argument("ap_from_curve needs a prime");
  return l + 1 - count_points(E, l);
}

namespace {

std::vector<long> compute_fourier(const CurveData& E, long M) {
  std::vector<long> a(static_cast<size_t>(M + 1), 0);
  if (M >= 1) a[1] = 1;
  for (long l : primes_up_to(M)) {
    long al = l == E.p ? E.ap : ap_from_curve(E, l);
    long prev = 1, cur = al;
    for (long q = l; q <= M; q *= l) {
      a[q] = cur;
      long next = l == E.p ? cur * al : al * cur - l * prev;
      prev = cur;
      cur = next;
      if (q > M / l) break;
    }
  }
  for (long n = 2; n <= M; ++n) {
    long m = n, l = 2;
    while (l * l <= m && m % l != 0) ++l;
    if (l * l > m) continue;  // prime
    long q = 1;
    while (m % l == 0) {
      m /= l;
      q *= l;
    }
    if (m > 1) a[n] = a[q] * a[m];
  }
  return a;
}

std::filesystem::path fourier_cache_file(const CurveData& E) {
  const char* dir = std::getenv("MOCKPLECTIC_CACHE_DIR");
  if (!dir || !*dir) return {};
  std::string key = E.label() + "_" + std::to_string(E.p);
  std::replace(key.begin(), key.end(), ',', '_');
  return std::filesystem::path(dir) / ("fourier_v1_" + key + ".txt");
}

}  // namespace

std::vector<long> fourier_coefficients(const CurveData& E, long M) {
  auto file = fourier_cache_file(E);
  if (!file.empty()) {
    std::ifstream in(file);
    std::vector<long> a{0};
    long x;
    while (in >> x) a.push_back(x);
    if (static_cast<long>(a.size()) > M && M >= 1 && a[1] == 1) {
      a.resize(static_cast<size_t>(M + 1));
      return a;
    }
  }
  auto a = compute_fourier(E, M);
  if (!file.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    std::ofstream out(file.string() + ".tmp");
    for (long n = 1; n <= M; ++n) out << a[static_cast<size_t>(n)] << "\n";
    out.close();
    if (out) std::filesystem::rename(file.string() + ".tmp", file, ec);
  }
  return a;
}

long torsion_bound(const CurveData& E, int nprimes) {
  long g = 0;
  int used = 0;
  for (long l = 3; used < nprimes; l += 2) {
    if (!is_prime(l) || l == E.p) continue;
    g = std::gcd(g, count_points(E, l));
    ++used;
  }
  return g;
}

long torsion_scale(const CurveData& E) {
  mpz_class A = -27 * E.c4(), B = -54 * E.c6();
  mpz_class disc = abs(E.discriminant());
  int k = valuation_of(disc, E.p);
  WCurve<mpq_class> W{0, 0, 0, mpq_class(A), mpq_class(B)};
  long count = 1;
  std::set<std::pair<mpz_class, mpz_class>> seen;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 6; ++b)
      for (int c = 0; 2 * c <= k; ++c) {
        for (int zero = 0; zero < 2; ++zero) {
          mpz_class Y = zero ? mpz_class(0) : prime_power(2, a) * prime_power(3, b) * prime_power(E.p, c);
          if (zero && (a || b || c)) continue;
          for (const auto& X : integer_roots(A, B - Y * Y)) {
            for (int neg = 0; neg < (Y == 0 ? 1 : 2); ++neg) {
              mpz_class y = neg ? mpz_class(-Y) : Y;
              if (!seen.insert({X, y}).second) continue;
              auto P = WPoint<mpq_class>::affine(X, y);
              WPoint<mpq_class> R = P;
              for (int n = 1; n <= 12; ++n) {
                if (R.infinity) {
                  ++count;
                  break;
                }
                R = W.add(R, P);
              }
            }
          }
        }
      }
  return count;
}

CurveData CurveData::make(const std::vector<long>& coeffs, long p) {
  if (coeffs.size() != 5) throw CurveError("expected five coefficients a1,a2,a3,a4,a6");
  if (p < 5 || !is_prime(p)) throw CurveError("p must be a prime >= 5");
  CurveData E;
  E.a1 = coeffs[0];
  E.a2 = coeffs[1];
  E.a3 = coeffs[2];
  E.a4 = coeffs[3];
  E.a6 = coeffs[4];
  E.p = p;
  mpz_class D = E.discriminant();
  if (D == 0) throw CurveError("singular curve");
  mpz_class c4 = E.c4();
  int vD = valuation_of(D, p);
  if (vD == 0) throw CurveError("good reduction at p");
  if (c4 % p == 0) throw CurveError("reduction at p is not multiplicative on this model");
  if (abs(D) != prime_power(p, vD)) throw CurveError("conductor is not p: discriminant has other prime factors");
  E.ap = legendre(mod(mpz_class(-E.c6()), p), p) == 1 ? 1 : -1;
  E.j = mpq_class(c4 * c4 * c4, D);
  E.j.canonicalize();
  E.torsion = torsion_scale(E);
  return E;
}

}  // namespace mockplectic
