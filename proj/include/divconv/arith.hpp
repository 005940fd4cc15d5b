#pragma once

// Exact integer primitives: factorization, generalised divisor values,
// valuations, CRT solvability and the congruence predicate g(u, v, w).

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace divconv {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

// Shift h and the three divisor orders of T(d_k, d_l, d_m; x, h).
struct DivisorParams {
  u64 h = 1;
  unsigned k = 2, l = 2, m = 2;

  // Throws std::invalid_argument unless h >= 1 and k, l, m >= min_order.
  void validate(unsigned min_order = 2) const;
  unsigned log_power() const { return k + l + m - 3; }
  friend bool operator==(const DivisorParams&, const DivisorParams&) = default;
};

struct PrimePower {
  u64 prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Canonical factorization: primes strictly increasing, exponents >= 1.
class Factorization {
 public:
  Factorization() = default;  // the unit 1
  Factorization(u64 value, std::vector<PrimePower> factors);

  u64 value() const { return value_; }
  const std::vector<PrimePower>& factors() const& { return factors_; }
  // by value on temporaries so `for (auto f : factorize(n).factors())` is safe
  std::vector<PrimePower> factors() && { return std::move(factors_); }
  bool is_one() const { return factors_.empty(); }

 private:
  u64 value_ = 1;
  std::vector<PrimePower> factors_;
};

// Trial division by primes below 2^16, then Miller-Rabin + Pollard rho.
// Throws std::invalid_argument for n = 0 or n >= 2^63.
Factorization factorize(u64 n);

bool is_prime(u64 n);

// d_k(p^j) = binom(k + j - 1, j). Throws OverflowError past 64 bits.
u64 dk_prime_power(unsigned k, u64 p, unsigned j);

// d_k(n) from a factorization (multiplicative). k = 0 gives [n = 1].
u64 dk_value(unsigned k, const Factorization& f);

// Largest e with p^e | n; requires p >= 2 and n >= 1.
unsigned vp(u64 p, u64 n);

u64 checked_mul(u64 a, u64 b);
u64 checked_lcm(u64 a, u64 b);

struct Congruence {
  u64 modulus;
  u64 residue;  // reduced into [0, modulus)
};

class CongruenceSystem {
 public:
  CongruenceSystem() = default;
  // x = residue (mod modulus); the residue may be negative.
  CongruenceSystem& add(i64 residue, u64 modulus);

  std::span<const Congruence> congruences() const { return items_; }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<Congruence> items_;
};

struct CrtSolution {
  u64 residue;
  u64 modulus;  // lcm of all moduli
};

// Solvable iff gcd(d_i, d_j) | (a_i - a_j) for every pair; the returned
// residue is the unique solution modulo the lcm. Throws OverflowError if the
// lcm exceeds 64 bits, std::invalid_argument on an empty system.
std::optional<CrtSolution> crt_solvable(const CongruenceSystem& sys);

// g(u, v, w) for the system n = -h (mod u), n = 0 (mod v), n = h (mod w),
// via gcd(u,v) | h, gcd(v,w) | h, gcd(u,w) | 2h.
int g_predicate(u64 u, u64 v, u64 w, u64 h);

// g(p^a, p^b, p^c) without forming the powers.
int g_prime_power(u64 p, unsigned a, unsigned b, unsigned c, u64 h);

}  // namespace divconv
