#pragma once

// The constant nabla_{h,k,l,m} as a product of prime-local Euler factors,
// the two local routes (direct C sum, psi series) with rigorous tails, the
// predicted main terms and the iterated logarithmic integral.

#include <gmpxx.h>

#include <vector>

#include "divconv/arith.hpp"

namespace divconv {

using Rational = mpq_class;
using BigInt = mpz_class;

struct TruncationBudget {
  u64 prime_cutoff = 100000;     // P: eta_p evaluated exactly for p <= P
  unsigned exponent_cutoff = 64;  // V: max nu in the direct C sums
  unsigned series_cutoff = 200;   // I: max i in the psi series
  double target_abs_tol = 1e-12;

  // V = max_p v_p(h) + 64, I = 200, P = 10^5.
  static TruncationBudget defaults_for(u64 h);
  // P >= 3, I >= 4, V >= v_p(h) + 2 for every p | 2h. Throws BudgetError.
  void validate(u64 h) const;
};

// Exact truncated value plus a rigorous bound on |true - value|.
struct EulerFactorValue {
  Rational value;
  double tail_bound = 0.0;
};

struct PrimeFactorLog {
  u64 p;
  Rational factor;
  double tail_bound;
};

struct NablaResult {
  DivisorParams params;
  TruncationBudget budget;
  double nabla = 0.0;
  double abs_error_bound = 0.0;
  long double log_nabla = 0.0;
  // Estimate of sum_{p > P} log eta_p folded into log_nabla.
  double prime_tail_estimate = 0.0;
  // Bound on the error of that estimate (log scale).
  double prime_tail_bound = 0.0;
  // Combined local factors for p | 2h, ascending.
  std::vector<PrimeFactorLog> special_factors;
  // Every local factor used, ascending in p.
  std::vector<PrimeFactorLog> per_prime_log;
  // C route vs psi route at p | 2h: max |C - psi| and whether every prime
  // agreed within the sum of both tails.
  double max_route_deviation = 0.0;
  bool routes_agree = true;
};

// Coefficients a_{i1,i2,i3} of
// eta(X,Y,Z) = A B + B C + C A - 2 A B C,  A = (1-X)^{k-1}, B = (1-Y)^{l-1}, C = (1-Z)^{m-1}.
class EtaPolynomial {
 public:
  EtaPolynomial(unsigned k, unsigned l, unsigned m);

  i64 coefficient(unsigned i1, unsigned i2, unsigned i3) const;
  unsigned degree_x() const { return k_ - 1; }
  unsigned degree_y() const { return l_ - 1; }
  unsigned degree_z() const { return m_ - 1; }
  // sum |a| over all non-constant monomials
  double abs_sum_nonconstant() const;
  // c_j = sum_{i1+i2+i3=j} a_{i1,i2,i3}, so eta(t,t,t) = sum_j c_j t^j
  std::vector<i64> diagonal() const;

 private:
  unsigned k_, l_, m_;
  std::vector<i64> a_, b_, c_;  // signed binomial rows
};

// Upper bound on sum_{nu >= first} d_K(p^nu) / p^nu from a geometric
// majorant; throws BudgetError if the majorant ratio is >= 1.
double binomial_tail_bound(unsigned K, unsigned first, u64 p);

// eta_p(0,0,0) for an odd prime p; zero tail.
EulerFactorValue eta_factor(u64 p, unsigned k, unsigned l, unsigned m);

// Truncated sum over 0 <= nu_i <= V of
// d_{k-1}(p^nu1) d_{l-1}(p^nu2) d_{m-1}(p^nu3) g(p^nu1,p^nu2,p^nu3) / [p^nu1,p^nu2,p^nu3].
EulerFactorValue c_factor_direct(u64 p, const DivisorParams& params, const TruncationBudget& budget);

// Local psi factor at an odd prime with v_p(h) = alpha >= 1.
EulerFactorValue psi_factor_odd(u64 p, unsigned alpha, unsigned k, unsigned l, unsigned m,
                                const TruncationBudget& budget);

// Local psi factor at p = 2 with v_2(h) = alpha >= 0.
EulerFactorValue psi_factor_two(unsigned alpha, unsigned k, unsigned l, unsigned m,
                                const TruncationBudget& budget);

// Local factor of nabla at p: eta_p for p not dividing 2h, otherwise
// c_factor_direct * (1 - 1/p)^{k+l+m-3}.
EulerFactorValue nabla_local_factor(u64 p, const DivisorParams& params, const TruncationBudget& budget);

NablaResult nabla_constant(const DivisorParams& params, const TruncationBudget& budget);

// sum over primes of p^-2.
long double prime_zeta_two();

// nabla x (log x)^{k+l+m-3} / ((k-1)! (l-1)! (m-1)!); x > 1.
double conjecture_main_term(const DivisorParams& params, double x, double nabla);
// The same divided by 3^{k+l+m-3}.
double lower_bound_main_term(const DivisorParams& params, double x, double nabla);

struct TailIdentityCheck {
  double lhs = 0.0;  // sum_{nu > alpha} d_{k-1}(p^nu) / p^nu
  double rhs = 0.0;  // (1 - 1/p) sum_{nu > alpha} d_k(p^nu) / p^nu - d_k(p^alpha) / p^{alpha+1}
  double deviation = 0.0;
};

// Both sides truncated after `terms` exponents, evaluated exactly.
TailIdentityCheck check_tail_identity(u64 p, unsigned alpha, unsigned k, unsigned terms = 200);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// r-fold integral over y_i >= 1, y_1 ... y_r <= x of dy / (y_1 ... y_r), by
// nested adaptive Gauss-Kronrod quadrature. Throws BudgetError when the
// estimated error exceeds quadrature_tol.
QuadratureResult iterated_log_integral(unsigned r, double x, double quadrature_tol);

}  // namespace divconv
