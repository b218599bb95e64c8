#pragma once

#include "mockplectic/pball.hpp"

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mockplectic {

/// Raised for invalid curve input; code() is "E_CURVE".
class CurveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  std::string code() const { return "E_CURVE"; }
};

struct CurveData {
  mpz_class a1, a2, a3, a4, a6;
  long p = 0;
  int ap = 0;
  mpq_class j;
  long torsion = 0;  // |E(Q)_tors|

  /// Validates conductor p (minimal multiplicative model at p, good reduction
  /// elsewhere) and fills a_p, j and the torsion order.
  static CurveData make(const std::vector<long>& coeffs, long p);

  mpz_class b2() const;
  mpz_class b4() const;
  mpz_class b6() const;
  mpz_class b8() const;
  mpz_class c4() const;
  mpz_class c6() const;
  mpz_class discriminant() const;
  std::string label() const;  // "a1,a2,a3,a4,a6"
};

bool is_prime(long n);
std::vector<long> primes_up_to(long n);

/// a_l = l + 1 - #E(F_l); for l = p this is the count on the nodal cubic.
long ap_from_curve(const CurveData& E, long l);
/// a_1..a_M (index 0 unused).
std::vector<long> fourier_coefficients(const CurveData& E, long M);

/// |E(Q)_tors| via Nagell-Lutz on the integral short model, bounded by the
/// gcd of #E(F_l) over good primes.
long torsion_scale(const CurveData& E);
long torsion_bound(const CurveData& E, int nprimes = 10);

/// Manin symbols (c:d) in P^1(F_p): index d/c for c != 0 and p for (0:1).
struct ManinBasis {
  long p = 0;
  std::vector<std::vector<mpq_class>> relations;  // rows over the p+1 symbols
  std::vector<std::vector<mpq_class>> solutions;  // basis of functionals killed by the relations

  long size() const { return p + 1; }
  long index(long c, long d) const;
  std::pair<long, long> symbol(long i) const;  // representative (c, d)
};

ManinBasis build_basis(long p);

/// Integer path-coefficients: m[inf, x] = sum_i coeff[i] * phi(x_i).
std::vector<long> manin_path(long p, const Cusp& x);
/// Same quantity by the ceiling continued fraction (independent code path).
std::vector<long> manin_path_ceiling(long p, const Cusp& x);

struct SymbolValue {
  mpz_class plus;
  mpz_class minus;
  bool operator==(const SymbolValue& o) const { return plus == o.plus && minus == o.minus; }
  SymbolValue operator+(const SymbolValue& o) const { return {plus + o.plus, minus + o.minus}; }
  SymbolValue operator-(const SymbolValue& o) const { return {plus - o.plus, minus - o.minus}; }
  SymbolValue operator-() const { return {-plus, -minus}; }
};

struct EigenSymbol {
  long p = 0;
  int ap = 0;
  std::vector<long> plus;   // phi^+ on Manin symbols, primitive
  std::vector<long> minus;  // phi^-
  std::map<long, long> eigenvalues;

  SymbolValue eval(const Cusp& r, const Cusp& s) const;
  /// m[inf, num/den] with 128-bit continued fractions; den > 0 or (num, den) = (1, 0).
  void eval_inf(__int128 num, __int128 den, long& out_plus, long& out_minus) const;
  /// m[r, s] for r = rn/rd, s = sn/sd.
  void eval_fast(__int128 rn, __int128 rd, __int128 sn, __int128 sd, long& out_plus, long& out_minus) const;

  /// Fills the (c mod p, d mod p) lookup tables used by eval_inf.
  void prepare();

 private:
  std::vector<long> plus_cd_, minus_cd_;
};

/// Integer matrix of T_l (U_p when l = p) on functionals: (T phi)_i = sum_j M[i][j] phi_j.
std::vector<std::vector<long>> hecke_matrix(long p, long l);

/// T_l (or U_p for l = p) applied to a functional on Manin symbols.
std::vector<mpq_class> hecke_apply(long p, long l, const std::vector<mpq_class>& phi);
/// Star involution (c:d) -> (-c:d).
std::vector<mpq_class> star_apply(long p, const std::vector<mpq_class>& phi);

/// Joint eigen-solve for T_l (l <= bound, l != p), U_p and the star involution.
EigenSymbol eigen_symbol(const CurveData& E, const ManinBasis& basis, long bound = 20);

/// Exact rational nullspace of the row matrix (columns = ncols).
std::vector<std::vector<mpq_class>> nullspace(std::vector<std::vector<mpq_class>> rows, size_t ncols);

}  // namespace mockplectic
