#include "divconv/expectations.hpp"

#include <cmath>
#include <stdexcept>

#include "divconv/errors.hpp"
#include "divconv/format.hpp"

namespace divconv {

namespace {

BigInt big(u128 v) {
  BigInt hi = static_cast<unsigned long>(static_cast<u64>(v >> 64));
  return (hi << 64) + BigInt(static_cast<unsigned long>(static_cast<u64>(v)));
}

// #{lo < n <= hi : n = r mod M}, 0 <= r < M
u64 count_class(u64 r, u64 M, u64 lo, u64 hi) {
  auto upto = [&](u64 t) -> u64 { return t >= r ? (t - r) / M + 1 : 0; };
  return upto(hi) - upto(lo);
}

// largest e with p^e <= limit, and the powers p^0..p^e
std::vector<u64> powers_upto(u64 p, u64 limit) {
  std::vector<u64> out{1};
  while (out.back() <= limit / p) out.push_back(out.back() * p);
  return out;
}

double rel(double v, double ref) { return std::fabs(v - ref) / std::fabs(ref); }

void check_range(u64 h, u64 x) {
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  if (x <= h) throw std::invalid_argument("empty range: need x > h");
  if (x >= (u64(1) << 62)) throw std::invalid_argument("x must be < 2^62");
}

}  // namespace

LocalExpectationQuery LocalExpectationQuery::make(u64 p, const DivisorParams& params) {
  params.validate();
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  LocalExpectationQuery q;
  q.p = p;
  q.h = params.h;
  q.k = params.k;
  q.l = params.l;
  q.m = params.m;
  q.alpha = vp(p, params.h);
  q.tag = p == 2 ? LocalCase::two : (q.alpha ? LocalCase::odd_dividing : LocalCase::odd_not_dividing);
  return q;
}

const char* case_name(LocalCase c) {
  switch (c) {
    case LocalCase::odd_not_dividing: return "odd-not-dividing";
    case LocalCase::odd_dividing: return "odd-dividing";
    case LocalCase::two: return "two";
  }
  return "?";
}

Rational exp_single_closed(u64 p, unsigned k) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  // (p / (p-1))^{k-1}
  BigInt num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), p, k - 1);
  mpz_ui_pow_ui(den.get_mpz_t(), p - 1, k - 1);
  Rational q(num, den);
  q.canonicalize();
  return q;
}

EulerFactorValue exp_triple_closed(const LocalExpectationQuery& q, const TruncationBudget& budget) {
  switch (q.tag) {
    case LocalCase::odd_not_dividing: {
      Rational v = exp_single_closed(q.p, q.k) + exp_single_closed(q.p, q.l) + exp_single_closed(q.p, q.m) - 2;
      v.canonicalize();
      return {v, 0.0};
    }
    case LocalCase::odd_dividing:
      return psi_factor_odd(q.p, q.alpha, q.k, q.l, q.m, budget);
    case LocalCase::two:
      return psi_factor_two(q.alpha, q.k, q.l, q.m, budget);
  }
  throw std::logic_error("unknown case");
}

EulerFactorValue expectation_ratio(const LocalExpectationQuery& q, const TruncationBudget& budget) {
  EulerFactorValue t = exp_triple_closed(q, budget);
  const Rational denom = exp_single_closed(q.p, q.k) * exp_single_closed(q.p, q.l) * exp_single_closed(q.p, q.m);
  Rational v = t.value / denom;
  v.canonicalize();
  return {v, t.tail_bound / denom.get_d() * (1.0 + 1e-12)};
}

EmpiricalEstimate exp_single_empirical(u64 p, unsigned k, u64 h, Slot slot, u64 x) {
  check_range(h, x);
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const u64 N = x - h;
  // m = n + offset runs over (h + offset, x + offset]
  u64 lo = h, hi = x;
  if (slot == Slot::plus_h) lo += h, hi += h;
  if (slot == Slot::minus_h) lo -= h, hi -= h;
  u128 total = 0;
  const auto pw = powers_upto(p, hi);
  for (unsigned a = 0; a < pw.size(); ++a) {
    total += u128(dk_prime_power(k - 1, p, a)) * count_class(0, pw[a], lo, hi);
  }
  EmpiricalEstimate e;
  e.x = x;
  e.count = N;
  e.exact = Rational(big(total), BigInt(static_cast<unsigned long>(N)));
  e.exact.canonicalize();
  e.value = e.exact.get_d();
  e.closed_form = exp_single_closed(p, k).get_d();
  e.rel_error = rel(e.value, e.closed_form);
  return e;
}

EmpiricalEstimate exp_triple_empirical(u64 p, const DivisorParams& params, u64 x, const TruncationBudget& budget) {
  const auto q = LocalExpectationQuery::make(p, params);
  const u64 h = params.h;
  check_range(h, x);
  const auto pa = powers_upto(p, x + h), pb = powers_upto(p, x), pc = powers_upto(p, x - h);
  std::vector<u64> wk(pa.size()), wl(pb.size()), wm(pc.size());
  for (unsigned i = 0; i < pa.size(); ++i) wk[i] = dk_prime_power(params.k - 1, p, i);
  for (unsigned i = 0; i < pb.size(); ++i) wl[i] = dk_prime_power(params.l - 1, p, i);
  for (unsigned i = 0; i < pc.size(); ++i) wm[i] = dk_prime_power(params.m - 1, p, i);

  u128 total = 0;
  for (unsigned a = 0; a < pa.size(); ++a) {
    for (unsigned b = 0; b < pb.size(); ++b) {
      for (unsigned c = 0; c < pc.size(); ++c) {
        CongruenceSystem sys;
        sys.add(-static_cast<i64>(h), pa[a]).add(0, pb[b]).add(static_cast<i64>(h), pc[c]);
        const auto sol = crt_solvable(sys);
        if (!sol) continue;
        const u64 n = count_class(sol->residue, sol->modulus, h, x);
        if (n == 0) continue;
        u128 w = u128(wk[a]) * wl[b];
        if (__builtin_mul_overflow(w, u128(wm[c]) * n, &w) || __builtin_add_overflow(total, w, &total)) {
          throw OverflowError("exp_triple_empirical: 128-bit overflow");
        }
      }
    }
  }
  EmpiricalEstimate e;
  e.x = x;
  e.count = x - h;
  e.exact = Rational(big(total), BigInt(static_cast<unsigned long>(e.count)));
  e.exact.canonicalize();
  e.value = e.exact.get_d();
  e.closed_form = exp_triple_closed(q, budget).value.get_d();
  e.rel_error = rel(e.value, e.closed_form);
  return e;
}

double density_estimate(const std::function<bool(u64)>& pred, u64 x) {
  if (x < 1) throw std::invalid_argument("density_estimate: x must be >= 1");
  u64 hits = 0;
  for (u64 n = 1; n <= x; ++n) hits += pred(n) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(x);
}

bool in_event_a(u64 n, u64 p, u64 h, unsigned j, int sign) {
  const unsigned alpha = vp(p, h);
  if (vp(p, n) != alpha) return false;
  u64 pa = 1;
  for (unsigned i = 0; i < alpha; ++i) pa *= p;
  const u64 n1 = n / pa, h1 = h / pa;
  if (sign < 0 && n1 == h1) return false;  // p^j || 0 never holds
  const u64 t = sign > 0 ? n1 + h1 : (n1 > h1 ? n1 - h1 : h1 - n1);
  return vp(p, t) == j;
}

std::string expectation_csv_header() { return "p,h,k,l,m,x,empirical,closed_form,rel_error"; }

std::string expectation_csv_row(u64 p, const DivisorParams& params, const EmpiricalEstimate& e) {
  return std::to_string(p) + "," + std::to_string(params.h) + "," + std::to_string(params.k) + "," +
         std::to_string(params.l) + "," + std::to_string(params.m) + "," + std::to_string(e.x) + "," +
         fmt_sci(e.value) + "," + fmt_sci(e.closed_form) + "," + fmt_sci(e.rel_error);
}

}  // namespace divconv
