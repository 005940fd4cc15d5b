#pragma once

// Slow reference implementations used only by the tests. None of them
// touch the library's factorization, sieve or CRT code.

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline std::vector<std::pair<u64, unsigned>> trial_factor(u64 n) {
  std::vector<std::pair<u64, unsigned>> f;
  for (u64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    unsigned e = 0;
    while (n % p == 0) n /= p, ++e;
    f.push_back({p, e});
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

// Number of ordered k-tuples of positive integers with product n.
inline u64 count_tuples(unsigned k, u64 n) {
  if (k == 0) return n == 1;
  if (k == 1) return 1;
  u64 total = 0;
  for (u64 a = 1; a <= n; ++a) {
    if (n % a == 0) total += count_tuples(k - 1, n / a);
  }
  return total;
}

// d_k(n) as a product of binomials over a trial-division factorization.
inline u64 dk(unsigned k, u64 n) {
  if (k == 0) return n == 1;
  u64 out = 1;
  for (auto [p, e] : trial_factor(n)) {
    u64 c = 1;
    for (unsigned i = 1; i <= e; ++i) c = c * (k - 1 + i) / i;
    out *= c;
  }
  return out;
}

// Smallest n in [0, lcm) meeting every congruence, or -1.
inline long long scan_congruences(const std::vector<std::pair<long long, u64>>& sys) {
  u64 L = 1;
  for (auto [r, m] : sys) L = std::lcm(L, m);
  for (u64 n = 0; n < L; ++n) {
    bool ok = true;
    for (auto [r, m] : sys) {
      long long rr = r % static_cast<long long>(m);
      if (rr < 0) rr += m;
      if (n % m != static_cast<u64>(rr)) {
        ok = false;
        break;
      }
    }
    if (ok) return static_cast<long long>(n);
  }
  return -1;
}

// g(u,v,w) from the system n = -h (u), n = 0 (v), n = h (w) by scanning.
inline int g_scan(u64 u, u64 v, u64 w, u64 h) {
  return scan_congruences({{-static_cast<long long>(h), u}, {0, v}, {static_cast<long long>(h), w}}) >= 0;
}

inline unsigned val(u64 p, u64 n) {
  unsigned e = 0;
  while (n % p == 0) n /= p, ++e;
  return e;
}

inline u64 ipow(u64 p, unsigned e) {
  u64 r = 1;
  while (e--) r *= p;
  return r;
}

// sum_{h < n <= x} d_k(n+h) d_l(n) d_m(n-h), factorizing each argument.
inline u128 triple_sum(u64 h, unsigned k, unsigned l, unsigned m, u64 x) {
  u128 s = 0;
  for (u64 n = h + 1; n <= x; ++n) s += u128(dk(k, n + h)) * dk(l, n) * dk(m, n - h);
  return s;
}

// Direct average of d_k(p^{v(n+h)}) d_l(p^{v(n)}) d_m(p^{v(n-h)}) over h < n <= x,
// returned as (numerator, count).
inline std::pair<u128, u64> local_triple_sum(u64 p, u64 h, unsigned k, unsigned l, unsigned m, u64 x) {
  u128 s = 0;
  for (u64 n = h + 1; n <= x; ++n) {
    s += u128(dk(k, ipow(p, val(p, n + h)))) * dk(l, ipow(p, val(p, n))) * dk(m, ipow(p, val(p, n - h)));
  }
  return {s, x - h};
}

}  // namespace oracle
