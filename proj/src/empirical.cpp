#include "divconv/empirical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "divconv/errors.hpp"
#include "divconv/sieve.hpp"

namespace divconv {

namespace {

constexpr u64 kSegment = 1u << 16;
constexpr u64 kWindowLimit = u64(1) << 32;

struct Term {
  unsigned order;
  i64 shift;  // d_order(n + shift)
};

struct Segment {
  u64 lo, hi;  // n in [lo, hi)
};

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

BigInt big(u128 v) {
  BigInt hi = static_cast<unsigned long>(static_cast<u64>(v >> 64));
  return (hi << 64) + BigInt(static_cast<unsigned long>(static_cast<u64>(v)));
}

inline void add_checked(u128& acc, u128 v) {
  if (__builtin_add_overflow(acc, v, &acc)) throw OverflowError("convolution sum exceeds 128 bits");
}

inline u128 product(const std::vector<const u64*>& col, std::size_t i) {
  u128 p = col[0][i];
  for (std::size_t t = 1; t < col.size(); ++t) {
    if (__builtin_mul_overflow(p, u128(col[t][i]), &p)) throw OverflowError("convolution term exceeds 128 bits");
  }
  return p;
}

// Sum of prod_t d_{order_t}(n + shift_t) over first <= n <= cut, for each
// cut (ascending). Each segment of n is sieved once per distinct order over
// the window [lo + min shift, hi + max shift).
std::vector<u128> stream_sums(const std::vector<Term>& terms, u64 first, std::span<const u64> cuts) {
  std::vector<u128> out(cuts.size(), 0);
  if (cuts.empty() || cuts.back() < first) return out;
  i64 smin = 0, smax = 0;
  for (const auto& t : terms) smin = std::min(smin, t.shift), smax = std::max(smax, t.shift);
  if (static_cast<i64>(first) + smin < 1) throw std::invalid_argument("summation range reaches n + shift < 1");
  if (cuts.back() + smax + 1 > kWindowLimit) throw std::invalid_argument("summation range exceeds 2^32");

  std::vector<unsigned> orders;
  for (const auto& t : terms) {
    if (std::find(orders.begin(), orders.end(), t.order) == orders.end()) orders.push_back(t.order);
  }
  std::vector<std::size_t> slot(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    slot[t] = std::find(orders.begin(), orders.end(), terms[t].order) - orders.begin();
  }

  std::vector<Segment> segs;
  std::vector<std::size_t> bucket;
  u64 lo = first;
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    if (c && cuts[c] < cuts[c - 1]) throw std::invalid_argument("grid must be ascending");
    const u64 end = cuts[c] + 1;
    for (; lo < end; lo = std::min(end, lo + kSegment)) {
      segs.push_back({lo, std::min(end, lo + kSegment)});
      bucket.push_back(c);
    }
  }

  const auto primes = primes_up_to(isqrt(cuts.back() + smax));
  std::vector<u128> partial(segs.size(), 0);
  std::atomic<bool> failed{false};
  std::exception_ptr error;

#pragma omp parallel
  {
    std::vector<std::vector<u64>> tables(orders.size());
    std::vector<std::uint32_t> scratch;
    std::vector<const u64*> col(terms.size());
#pragma omp for schedule(dynamic, 1)
    for (std::size_t s = 0; s < segs.size(); ++s) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        const u64 wlo = segs[s].lo + smin, whi = segs[s].hi + smax;
        for (std::size_t o = 0; o < orders.size(); ++o) {
          tables[o].resize(whi - wlo);
          sieve_segment(orders[o], wlo, whi, primes, tables[o], scratch);
        }
        for (std::size_t t = 0; t < terms.size(); ++t) col[t] = tables[slot[t]].data() + (terms[t].shift - smin);
        u128 acc = 0;
        const std::size_t len = segs[s].hi - segs[s].lo;
        for (std::size_t i = 0; i < len; ++i) add_checked(acc, product(col, i));
        partial[s] = acc;
      } catch (...) {
#pragma omp critical(divconv_stream_error)
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);

  u128 running = 0;
  std::size_t s = 0;
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    for (; s < segs.size() && bucket[s] == c; ++s) add_checked(running, partial[s]);
    out[c] = running;
  }
  return out;
}

u128 serial_sum(const std::vector<Term>& terms, u64 first, u64 last) {
  if (last < first) return 0;
  i64 smax = 0;
  for (const auto& t : terms) smax = std::max(smax, t.shift);
  std::vector<DkTable> tables;
  for (const auto& t : terms) {
    SieveConfig cfg;
    cfg.k = t.order;
    cfg.range_start = 1;
    cfg.range_end = last + smax + 1;
    tables.push_back(dk_range_serial(cfg));
  }
  u128 acc = 0;
  for (u64 n = first; n <= last; ++n) {
    u128 p = 1;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (__builtin_mul_overflow(p, u128(tables[t].values[n + terms[t].shift - 1]), &p)) {
        throw OverflowError("convolution term exceeds 128 bits");
      }
    }
    add_checked(acc, p);
  }
  return acc;
}

std::vector<Term> triple_terms(const DivisorParams& p) {
  return {{p.k, static_cast<i64>(p.h)}, {p.l, 0}, {p.m, -static_cast<i64>(p.h)}};
}

void check_triple(const DivisorParams& params) {
  params.validate(1);
  if (params.h >= (u64(1) << 31)) throw std::invalid_argument("h must be < 2^31");
}

void check_orders(unsigned k, unsigned l, unsigned m) {
  if (k < 1 || l < 1 || m < 1) throw std::invalid_argument("k, l, m must be >= 1");
}

std::vector<u64> d_minus_one(unsigned k, u64 x) {
  std::vector<u64> c(x + 1, 0);
  for (u64 u = 1; u <= x; ++u) c[u] = dk_value(k - 1, factorize(u));
  return c;
}

Rational finish(const std::unordered_map<u64, u128>& by_lcm) {
  std::vector<u64> keys;
  keys.reserve(by_lcm.size());
  for (const auto& [L, n] : by_lcm) keys.push_back(L);
  std::sort(keys.begin(), keys.end());
  BigInt M = 1;
  for (u64 L : keys) mpz_lcm_ui(M.get_mpz_t(), M.get_mpz_t(), L);
  BigInt num = 0, q;
  for (u64 L : keys) {
    mpz_divexact_ui(q.get_mpz_t(), M.get_mpz_t(), L);
    num += q * big(by_lcm.at(L));
  }
  Rational r(num, M);
  r.canonicalize();
  return r;
}

constexpr u64 kTheorem4Max = 500;

void check_theorem4(unsigned k, unsigned l, unsigned m, u64 h, u64 x) {
  check_orders(k, l, m);
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  if (h >= (u64(1) << 62)) throw std::invalid_argument("h must be < 2^62");
  if (x > kTheorem4Max) throw std::invalid_argument("theorem4 direct sum needs x <= 500; use the constant route");
}

}  // namespace

u128 triple_convolution_sum(const DivisorParams& params, u64 x) {
  check_triple(params);
  if (x <= params.h) return 0;
  const u64 cut[1] = {x};
  return stream_sums(triple_terms(params), params.h + 1, cut)[0];
}

u128 triple_convolution_sum_serial(const DivisorParams& params, u64 x) {
  check_triple(params);
  if (x <= params.h) return 0;
  return serial_sum(triple_terms(params), params.h + 1, x);
}

std::vector<u128> triple_prefix_sums(const DivisorParams& params, std::span<const u64> x_grid) {
  check_triple(params);
  for (u64 x : x_grid) {
    if (x <= params.h) throw std::invalid_argument("empty range: x = " + std::to_string(x) + " <= h");
  }
  return stream_sums(triple_terms(params), params.h + 1, x_grid);
}

std::vector<u128> triple_prefix_sums_from_tables(const DivisorParams& params, std::span<const u64> x_grid,
                                                 const DkTable& tk, const DkTable& tl, const DkTable& tm) {
  check_triple(params);
  std::vector<u128> out(x_grid.size(), 0);
  if (x_grid.empty()) return out;
  const u64 h = params.h;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (x_grid[i] <= h) throw std::invalid_argument("empty range: x = " + std::to_string(x_grid[i]) + " <= h");
    if (i && x_grid[i] < x_grid[i - 1]) throw std::invalid_argument("grid must be ascending");
  }
  const u64 last = x_grid.back();
  for (const DkTable* t : {&tk, &tl, &tm}) {
    if (t->offset != 1 || t->end() < last + h + 1) throw std::invalid_argument("table does not cover the range");
  }
  if (tk.k != params.k || tl.k != params.l || tm.k != params.m) throw std::invalid_argument("table orders do not match");
  u128 acc = 0;
  std::size_t c = 0;
  for (u64 n = h + 1; n <= last; ++n) {
    u128 p = u128(tk.values[n + h - 1]) * tl.values[n - 1];
    if (__builtin_mul_overflow(p, u128(tm.values[n - h - 1]), &p)) throw OverflowError("convolution term exceeds 128 bits");
    add_checked(acc, p);
    while (c < x_grid.size() && x_grid[c] == n) out[c++] = acc;
  }
  return out;
}

u128 shifted_convolution_sum(unsigned k, unsigned l, u64 h, u64 x) {
  check_orders(k, l, 1);
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  if (x == 0) return 0;
  const u64 cut[1] = {x};
  return stream_sums({{k, static_cast<i64>(h)}, {l, 0}}, 1, cut)[0];
}

u128 shifted_convolution_sum_serial(unsigned k, unsigned l, u64 h, u64 x) {
  check_orders(k, l, 1);
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  return serial_sum({{k, static_cast<i64>(h)}, {l, 0}}, 1, x);
}

u128 additive_convolution_sum(u64 N) {
  if (N < 2) throw std::invalid_argument("N must be >= 2");
  SieveConfig cfg;
  cfg.k = 2;
  cfg.range_start = 1;
  cfg.range_end = N;
  const DkTable t = dk_range(cfg);
  const u64* d = t.values.data() - 1;  // d[n] = d(n)
  u128 total = 0;
#pragma omp parallel
  {
    u128 local = 0;
#pragma omp for schedule(static)
    for (u64 n = 1; n < N; ++n) local += u128(d[n]) * d[N - n];
#pragma omp critical(divconv_additive)
    total += local;
  }
  return total;
}

Rational theorem4_lhs_direct(unsigned k, unsigned l, unsigned m, u64 h, u64 x) {
  check_theorem4(k, l, m, h, x);
  if (x == 0) return 0;
  const auto cu = d_minus_one(k, x), cv = d_minus_one(l, x), cw = d_minus_one(m, x);
  const std::size_t W = x + 1;
  std::vector<std::uint16_t> G(W * W, 0);
  for (u64 a = 1; a <= x; ++a) {
    for (u64 b = 1; b <= x; ++b) G[a * W + b] = static_cast<std::uint16_t>(std::gcd(a, b));
  }
  const u64 h2 = 2 * h;
  std::unordered_map<u64, u128> merged;
#pragma omp parallel
  {
    std::unordered_map<u64, u128> local;
#pragma omp for schedule(dynamic, 1)
    for (u64 u = 1; u <= x; ++u) {
      if (!cu[u]) continue;
      for (u64 v = 1; v <= x; ++v) {
        if (!cv[v]) continue;
        const u64 guv = G[u * W + v];
        if (h % guv) continue;
        const u64 luv = u / guv * v;
        const u128 cuv = u128(cu[u]) * cv[v];
        for (u64 w = 1; w <= x; ++w) {
          if (!cw[w] || h % G[v * W + w] || h2 % G[u * W + w]) continue;
          const u64 L = luv / std::gcd(luv, w) * w;
          local[L] += cuv * cw[w];
        }
      }
    }
#pragma omp critical(divconv_theorem4)
    for (const auto& [L, n] : local) merged[L] += n;
  }
  return finish(merged);
}

Rational theorem4_lhs_naive(unsigned k, unsigned l, unsigned m, u64 h, u64 x) {
  check_theorem4(k, l, m, h, x);
  const auto cu = d_minus_one(k, x), cv = d_minus_one(l, x), cw = d_minus_one(m, x);
  std::unordered_map<u64, u128> by_lcm;
  for (u64 u = 1; u <= x; ++u) {
    for (u64 v = 1; v <= x; ++v) {
      for (u64 w = 1; w <= x; ++w) {
        const u128 c = u128(cu[u]) * cv[v] * cw[w];
        if (!c) continue;
        CongruenceSystem sys;
        sys.add(-static_cast<i64>(h), u).add(0, v).add(static_cast<i64>(h), w);
        const auto sol = crt_solvable(sys);
        if (sol) by_lcm[sol->modulus] += c;
      }
    }
  }
  std::vector<std::pair<u64, u128>> items(by_lcm.begin(), by_lcm.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Rational total = 0;
  for (const auto& [L, n] : items) {
    Rational term(big(n), BigInt(static_cast<unsigned long>(L)));
    term.canonicalize();
    total += term;
  }
  return total;
}

RatioTable ratio_table(const DivisorParams& params, std::span<const u64> x_grid, const NablaResult& nabla) {
  params.validate();
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (x_grid[i] <= x_grid[i - 1]) throw std::invalid_argument("x grid must be strictly ascending");
  }
  const auto sums = triple_prefix_sums(params, x_grid);
  RatioTable table;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    RatioRow row;
    row.x = x_grid[i];
    row.h = params.h;
    row.k = params.k;
    row.l = params.l;
    row.m = params.m;
    row.sum = sums[i];
    const double x = static_cast<double>(row.x);
    RatioRow lower = row;
    row.main_term = conjecture_main_term(params, x, nabla.nabla);
    row.ratio = static_cast<double>(row.sum) / row.main_term;
    lower.main_term = lower_bound_main_term(params, x, nabla.nabla);
    lower.ratio = static_cast<double>(lower.sum) / lower.main_term;
    table.rows.push_back(row);
    table.lower_rows.push_back(lower);
  }
  return table;
}

u128 sigma_one(u64 n) {
  u128 s = 1;
  for (const auto& [p, e] : factorize(n).factors()) {
    u128 term = 1, pk = 1;
    for (unsigned i = 0; i < e; ++i) pk *= p, term += pk;
    s *= term;
  }
  return s;
}

Rational sigma_minus_one(u64 h) {
  Rational r(big(sigma_one(h)), BigInt(static_cast<unsigned long>(h)));
  r.canonicalize();
  return r;
}

PairCheck ingham_check(u64 h, u64 N) {
  if (N < 10) throw std::invalid_argument("N must be >= 10");
  PairCheck out;
  out.sum = shifted_convolution_sum(2, 2, h, N);
  const double L = std::log(static_cast<double>(N));
  out.main_term = 6.0 / (std::numbers::pi * std::numbers::pi) * sigma_minus_one(h).get_d() *
                  static_cast<double>(N) * L * L;
  out.ratio = static_cast<double>(out.sum) / out.main_term;
  return out;
}

PairCheck additive_check(u64 N) {
  if (N < 10) throw std::invalid_argument("N must be >= 10");
  PairCheck out;
  out.sum = additive_convolution_sum(N);
  const double L = std::log(static_cast<double>(N));
  out.main_term = 6.0 / (std::numbers::pi * std::numbers::pi) * static_cast<double>(sigma_one(N)) * L * L;
  out.ratio = static_cast<double>(out.sum) / out.main_term;
  return out;
}

}  // namespace divconv
