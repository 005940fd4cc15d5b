#pragma once

// Exact convolution sums over sieved d_k tables, the direct triple sum
// over (u, v, w), and ratio tables against the predicted main terms.
// Sums run over h < n <= x so that n - h >= 1.

#include <span>
#include <vector>

#include "divconv/arith.hpp"
#include "divconv/constants.hpp"
#include "divconv/sieve.hpp"

namespace divconv {

// sum_{h < n <= x} d_k(n+h) d_l(n) d_m(n-h); segment-parallel.
u128 triple_convolution_sum(const DivisorParams& params, u64 x);
// Same sum from whole-range tables on one thread.
u128 triple_convolution_sum_serial(const DivisorParams& params, u64 x);

// Values of the triple sum at every point of an ascending grid, from one
// pass over [h+1, max x].
std::vector<u128> triple_prefix_sums(const DivisorParams& params, std::span<const u64> x_grid);

// The same prefix sums read from precomputed tables starting at 1 that
// cover n + h <= max x + h (as loaded from a SieveCache).
std::vector<u128> triple_prefix_sums_from_tables(const DivisorParams& params, std::span<const u64> x_grid,
                                                 const DkTable& tk, const DkTable& tl, const DkTable& tm);

// sum_{1 <= n <= x} d_k(n+h) d_l(n)
u128 shifted_convolution_sum(unsigned k, unsigned l, u64 h, u64 x);
u128 shifted_convolution_sum_serial(unsigned k, unsigned l, u64 h, u64 x);

// sum_{1 <= n < N} d(n) d(N-n)
u128 additive_convolution_sum(u64 N);

// sum_{u,v,w <= x} g(u,v,w) d_{k-1}(u) d_{l-1}(v) d_{m-1}(w) / [u,v,w], with
// d_0(n) = [n = 1]. x <= 500.
Rational theorem4_lhs_direct(unsigned k, unsigned l, unsigned m, u64 h, u64 x);
// Per-triple CRT solvability instead of the gcd tables.
Rational theorem4_lhs_naive(unsigned k, unsigned l, unsigned m, u64 h, u64 x);

struct RatioRow {
  u64 x = 0, h = 1;
  unsigned k = 2, l = 2, m = 2;
  u128 sum = 0;
  double main_term = 0.0;
  double ratio = 0.0;
};

struct RatioTable {
  std::vector<RatioRow> rows;         // against the conjectured main term
  std::vector<RatioRow> lower_rows;   // against main term / 3^{k+l+m-3}
};

RatioTable ratio_table(const DivisorParams& params, std::span<const u64> x_grid, const NablaResult& nabla);

struct PairCheck {
  u128 sum = 0;
  double main_term = 0.0;
  double ratio = 0.0;
};

// sigma_{-1}(h) = sum_{d | h} 1/d, exact.
Rational sigma_minus_one(u64 h);
// sigma_1(n) = sum_{d | n} d
u128 sigma_one(u64 n);

// d(n) d(n+h) over n <= N against (6/pi^2) sigma_{-1}(h) N (log N)^2.
PairCheck ingham_check(u64 h, u64 N);
// d(n) d(N-n) over n < N against (6/pi^2) sigma_1(N) (log N)^2.
PairCheck additive_check(u64 N);

}  // namespace divconv
