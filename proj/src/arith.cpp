#include "divconv/arith.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "divconv/errors.hpp"

namespace divconv {

namespace {

constexpr u64 kTrialLimit = 1u << 16;

const std::vector<u64>& small_primes() {
  static const std::vector<u64> primes = [] {
    std::vector<bool> composite(kTrialLimit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= kTrialLimit; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (u64 j = i * i; j <= kTrialLimit; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, unsigned s) {
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned r = 1; r < s; ++r) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

// Brent's variant; n is odd, composite, and has no factor below 2^16.
u64 pollard_rho(u64 n) {
  for (u64 c = 1;; ++c) {
    auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    constexpr u64 m = 128;
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void split_large(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  split_large(d, out);
  split_large(n / d, out);
}

}  // namespace

void DivisorParams::validate(unsigned min_order) const {
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  if (k < min_order || l < min_order || m < min_order) {
    throw std::invalid_argument("k, l, m must be >= " + std::to_string(min_order));
  }
}

Factorization::Factorization(u64 value, std::vector<PrimePower> factors)
    : value_(value), factors_(std::move(factors)) {
  if (value_ == 0) throw std::invalid_argument("factorization of 0");
  u64 product = 1;
  u64 last = 1;
  for (const auto& [p, e] : factors_) {
    if (p <= last || e == 0) throw std::invalid_argument("non-canonical factorization");
    last = p;
    for (unsigned i = 0; i < e; ++i) product = checked_mul(product, p);
  }
  if (product != value_) throw std::invalid_argument("factorization does not multiply to value");
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  unsigned s = std::countr_zero(d);
  d >>= s;
  // These bases are deterministic for all n < 3.3e24.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
  if (n >> 63) throw std::invalid_argument("factorize: n must be < 2^63");
  const u64 original = n;
  std::vector<PrimePower> factors;
  for (u64 p : small_primes()) {
    if (p * p > n) break;
    if (n % p) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    factors.push_back({p, e});
  }
  if (n > 1) {
    std::vector<u64> big;
    if (n <= kTrialLimit * kTrialLimit) {
      big.push_back(n);  // no factor below its square root remains
    } else {
      split_large(n, big);
    }
    std::sort(big.begin(), big.end());
    for (u64 p : big) {
      if (!factors.empty() && factors.back().prime == p) {
        ++factors.back().exponent;
      } else {
        factors.push_back({p, 1});
      }
    }
  }
  return Factorization(original, std::move(factors));
}

u64 dk_prime_power(unsigned k, u64 /*p*/, unsigned j) {
  if (k == 0) return j == 0 ? 1 : 0;
  if (j == 0 || k == 1) return 1;
  // binom(k + j - 1, j) = binom(k - 1 + j, k - 1); iterate over the smaller index.
  const u64 n = u64(k) - 1 + j;
  const u64 r = std::min<u64>(j, u64(k) - 1);
  u128 acc = 1;
  for (u64 i = 1; i <= r; ++i) {
    // acc < 2^64 on entry, so the product fits; the division is exact.
    acc = acc * (n - r + i) / i;
    if (acc >> 64) {
      throw OverflowError("d_k(p^j) overflows 64 bits (k=" + std::to_string(k) +
                          ", j=" + std::to_string(j) + ")");
    }
  }
  return static_cast<u64>(acc);
}

u64 dk_value(unsigned k, const Factorization& f) {
  u64 result = 1;
  for (const auto& [p, e] : f.factors()) result = checked_mul(result, dk_prime_power(k, p, e));
  if (k == 0) return f.is_one() ? 1 : 0;
  return result;
}

unsigned vp(u64 p, u64 n) {
  if (p < 2 || n == 0) throw std::invalid_argument("vp: need p >= 2 and n >= 1");
  if (p == 2) return std::countr_zero(n);
  unsigned e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

u64 checked_mul(u64 a, u64 b) {
  u64 out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("64-bit multiplication overflow");
  return out;
}

u64 checked_lcm(u64 a, u64 b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / std::gcd(a, b), b);
}

CongruenceSystem& CongruenceSystem::add(i64 residue, u64 modulus) {
  if (modulus == 0) throw std::invalid_argument("congruence modulus must be >= 1");
  i128 r = residue % i128(modulus);
  if (r < 0) r += modulus;
  items_.push_back({modulus, static_cast<u64>(r)});
  return *this;
}

std::optional<CrtSolution> crt_solvable(const CongruenceSystem& sys) {
  if (sys.empty()) throw std::invalid_argument("crt_solvable: empty system");
  const auto items = sys.congruences();
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const u64 g = std::gcd(items[i].modulus, items[j].modulus);
      const u64 diff = items[i].residue > items[j].residue ? items[i].residue - items[j].residue
                                                           : items[j].residue - items[i].residue;
      if (diff % g) return std::nullopt;
    }
  }
  // Merge pairwise; each step solves x = a (mod m), x = b (mod n).
  u64 a = items[0].residue;
  u64 m = items[0].modulus;
  for (std::size_t i = 1; i < items.size(); ++i) {
    const u64 b = items[i].residue;
    const u64 n = items[i].modulus;
    const u64 g = std::gcd(m, n);
    const u64 n_red = n / g;
    const u64 lcm = checked_mul(m / g, n);
    // t = ((b - a) / g) * inverse(m / g) mod n / g
    i128 diff = (i128(b) - i128(a)) / i128(g);
    i128 t = 0;
    if (n_red > 1) {
      // extended Euclid on (m/g mod n_red, n_red)
      i128 old_r = i128((m / g) % n_red), r = n_red, old_s = 1, s = 0;
      while (r != 0) {
        const i128 q = old_r / r;
        std::tie(old_r, r) = std::pair{r, old_r - q * r};
        std::tie(old_s, s) = std::pair{s, old_s - q * s};
      }
      i128 inv = old_s % i128(n_red);
      if (inv < 0) inv += n_red;
      i128 d = diff % i128(n_red);
      if (d < 0) d += n_red;
      t = d * inv % i128(n_red);
    }
    i128 x = (i128(a) + i128(m) * t) % i128(lcm);
    if (x < 0) x += lcm;
    a = static_cast<u64>(x);
    m = lcm;
  }
  return CrtSolution{a, m};
}

int g_predicate(u64 u, u64 v, u64 w, u64 h) {
  if (u == 0 || v == 0 || w == 0 || h == 0) throw std::invalid_argument("g_predicate: arguments must be >= 1");
  const u128 two_h = u128(h) * 2;
  return h % std::gcd(u, v) == 0 && h % std::gcd(v, w) == 0 && two_h % std::gcd(u, w) == 0;
}

int g_prime_power(u64 p, unsigned a, unsigned b, unsigned c, u64 h) {
  if (h == 0) throw std::invalid_argument("g_prime_power: h must be >= 1");
  const unsigned alpha = vp(p, h);
  const unsigned alpha_2h = p == 2 ? alpha + 1 : alpha;
  return std::min(a, b) <= alpha && std::min(b, c) <= alpha && std::min(a, c) <= alpha_2h;
}

}  // namespace divconv
