#pragma once

// Prime-local expectations of X_p = d_k(p^{v_p(n+h)}), Y_p = d_l(p^{v_p(n)}),
// Z_p = d_m(p^{v_p(n-h)}) under natural density: closed forms and exact
// finite-x averages over h < n <= x.

#include <functional>
#include <string>

#include "divconv/arith.hpp"
#include "divconv/constants.hpp"

namespace divconv {

enum class LocalCase { odd_not_dividing, odd_dividing, two };

struct LocalExpectationQuery {
  u64 p = 2;
  u64 h = 1;
  unsigned k = 2, l = 2, m = 2;
  unsigned alpha = 0;  // v_p(h)
  LocalCase tag = LocalCase::two;

  static LocalExpectationQuery make(u64 p, const DivisorParams& params);
};

const char* case_name(LocalCase c);

// E(X_p) = (1 - 1/p)^{1-k}; k = 1 gives 1.
Rational exp_single_closed(u64 p, unsigned k);

// E(X_p Y_p Z_p).
EulerFactorValue exp_triple_closed(const LocalExpectationQuery& q, const TruncationBudget& budget);

// E(X_p Y_p Z_p) / (E(X_p) E(Y_p) E(Z_p)), tail scaled accordingly.
EulerFactorValue expectation_ratio(const LocalExpectationQuery& q, const TruncationBudget& budget);

// Which of the three shifted arguments n+h, n, n-h is sampled.
enum class Slot { plus_h, zero, minus_h };

struct EmpiricalEstimate {
  u64 x = 0;
  u64 count = 0;      // N = #{h < n <= x}
  Rational exact;     // the average as an exact rational
  double value = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
};

// Average of d_k(p^{v_p(n + offset)}) over h < n <= x, offset from `slot`.
EmpiricalEstimate exp_single_empirical(u64 p, unsigned k, u64 h, Slot slot, u64 x);

// Average of X_p Y_p Z_p over h < n <= x. The triple of valuations is
// counted class by class: sum_n prod d(p^{v}) = sum_{a,b,c} d_{k-1}(p^a)
// d_{l-1}(p^b) d_{m-1}(p^c) #{n : p^a | n+h, p^b | n, p^c | n-h}.
EmpiricalEstimate exp_triple_empirical(u64 p, const DivisorParams& params, u64 x,
                                       const TruncationBudget& budget = {});

// #{1 <= n <= x : pred(n)} / x
double density_estimate(const std::function<bool(u64)>& pred, u64 x);

// n in A_j^+ (sign > 0) or A_j^- (sign < 0): p^alpha || n and
// p^j || n/p^alpha +- h/p^alpha, where alpha = v_p(h).
bool in_event_a(u64 n, u64 p, u64 h, unsigned j, int sign);

// p,h,k,l,m,x,empirical,closed_form,rel_error
std::string expectation_csv_header();
std::string expectation_csv_row(u64 p, const DivisorParams& params, const EmpiricalEstimate& e);

}  // namespace divconv
