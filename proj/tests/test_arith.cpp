#include <doctest.h>

#include <cmath>
#include <random>

#include "divconv/arith.hpp"
#include "divconv/errors.hpp"
#include "oracles.hpp"

using namespace divconv;

namespace {

u64 remultiply(const Factorization& f) {
  u64 v = 1;
  for (const auto& [p, e] : f.factors()) {
    for (unsigned i = 0; i < e; ++i) v *= p;
  }
  return v;
}

}  // namespace

TEST_CASE("factorize small values") {
  CHECK(factorize(1).is_one());
  CHECK(factorize(1).factors().empty());
  CHECK(factorize(12).factors() == std::vector<PrimePower>{{2, 2}, {3, 1}});
  CHECK(factorize(97).factors() == std::vector<PrimePower>{{97, 1}});
  CHECK_THROWS_AS(factorize(0), std::invalid_argument);
  for (u64 n = 1; n <= 3000; ++n) {
    const auto f = factorize(n);
    const auto t = oracle::trial_factor(n);
    REQUIRE(f.factors().size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(f.factors()[i].prime == t[i].first);
      CHECK(f.factors()[i].exponent == t[i].second);
    }
  }
}

TEST_CASE("factorize large values re-multiplies") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const u64 n = (rng() >> 1) | 1;
    const auto f = factorize(n);
    CHECK(remultiply(f) == n);
    for (const auto& [p, e] : f.factors()) CHECK(is_prime(p));
  }
  // two 31-bit primes
  const auto f = factorize(u64(2147483647) * 2147483629ull);
  CHECK(f.factors() == std::vector<PrimePower>{{2147483629, 1}, {2147483647, 1}});
  CHECK(factorize((u64(1) << 63) - 1).value() == (u64(1) << 63) - 1);
  CHECK_THROWS_AS(factorize(u64(1) << 63), std::invalid_argument);
}

TEST_CASE("factorization invariants are enforced") {
  CHECK_THROWS_AS(Factorization(12, {{3, 1}, {2, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(Factorization(12, {{2, 1}, {3, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Factorization(4, {{2, 0}, {2, 2}}), std::invalid_argument);
  CHECK_NOTHROW(Factorization(12, {{2, 2}, {3, 1}}));
}

TEST_CASE("dk_prime_power values") {
  CHECK(dk_prime_power(2, 2, 3) == 4);
  CHECK(dk_prime_power(3, 2, 2) == 6);
  CHECK(dk_prime_power(1, 7, 5) == 1);
  CHECK(dk_prime_power(4, 3, 0) == 1);
  CHECK(dk_prime_power(4, 2, 3) == 20);
  CHECK(dk_prime_power(3, 2, 2) == oracle::count_tuples(3, 4));
  CHECK_THROWS_AS(dk_prime_power(60, 2, 60), OverflowError);
  CHECK(dk_prime_power(2, 2, 1000000) == 1000001);
}

TEST_CASE("dk_value matches tuple enumeration") {
  CHECK(dk_value(2, factorize(6)) == 4);
  CHECK(dk_value(3, factorize(12)) == 18);
  CHECK(dk_value(5, factorize(1)) == 1);
  CHECK(dk_value(0, factorize(1)) == 1);
  CHECK(dk_value(0, factorize(2)) == 0);
  for (unsigned k = 1; k <= 4; ++k) {
    for (u64 n = 1; n <= 120; ++n) CHECK(dk_value(k, factorize(n)) == oracle::count_tuples(k, n));
  }
}

TEST_CASE("d_k is d_{k-1} convolved with 1") {
  for (unsigned k = 2; k <= 6; ++k) {
    std::vector<u64> prev(10001), cur(10001);
    for (u64 n = 1; n <= 10000; ++n) prev[n] = dk_value(k - 1, factorize(n));
    for (u64 n = 1; n <= 10000; ++n) cur[n] = dk_value(k, factorize(n));
    for (u64 n = 1; n <= 10000; ++n) {
      u64 s = 0;
      for (u64 a = 1; a * a <= n; ++a) {
        if (n % a) continue;
        s += prev[a];
        if (a * a != n) s += prev[n / a];
      }
      REQUIRE(cur[n] == s);
    }
  }
}

TEST_CASE("power series of (1-x)^-k with remainder bound") {
  for (u64 p : {2, 3, 5}) {
    for (unsigned k = 1; k <= 6; ++k) {
      for (long double x : {0.05L, 0.3L, 0.6L, 0.9L}) {
        const long double exact = std::pow(1.0L - x, -static_cast<long double>(k));
        long double prev_err = INFINITY;
        for (unsigned J : {60u, 120u, 240u}) {
          long double s = 0, xj = 1;
          for (unsigned j = 0; j <= J; ++j, xj *= x) s += dk_prime_power(k, p, j) * xj;
          const long double ratio = x * std::pow(1.0L + 1.0L / J, static_cast<long double>(k) - 1);
          const long double err = std::fabs(exact - s);
          if (ratio < 1) {
            const long double bound = dk_prime_power(k, p, J + 1) * xj / (1 - ratio);
            CHECK(err <= bound * (1 + 1e-9L) + 1e-15L * exact);
          }
          CHECK(err <= prev_err);
          prev_err = err;
        }
      }
    }
  }
}

TEST_CASE("vp") {
  CHECK(vp(2, 12) == 2);
  CHECK(vp(3, 12) == 1);
  CHECK(vp(5, 12) == 0);
  CHECK(vp(2, u64(1) << 40) == 40);
  CHECK_THROWS_AS(vp(2, 0), std::invalid_argument);
}

TEST_CASE("crt solvability and solutions") {
  {
    CongruenceSystem s;
    s.add(1, 2).add(2, 3);
    const auto r = crt_solvable(s);
    REQUIRE(r);
    CHECK(r->residue == 5);
    CHECK(r->modulus == 6);
  }
  {
    CongruenceSystem s;
    s.add(0, 2).add(1, 2);
    CHECK_FALSE(crt_solvable(s));
  }
  {
    CongruenceSystem s;
    s.add(1, 4).add(3, 6);
    const auto r = crt_solvable(s);
    REQUIRE(r);
    CHECK(r->residue == 9);
    CHECK(r->modulus == 12);
  }
  {
    CongruenceSystem s;
    s.add(-7, 5);
    CHECK(s.congruences()[0].residue == 3);
  }
  CHECK_THROWS_AS(crt_solvable(CongruenceSystem{}), std::invalid_argument);
  {
    CongruenceSystem s;
    s.add(1, 4294967291ull).add(2, 4294967279ull).add(3, 4294967231ull);
    CHECK_THROWS_AS(crt_solvable(s), OverflowError);
  }
}

TEST_CASE("crt agrees with a residue scan") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 3000; ++t) {
    const int r = 1 + static_cast<int>(rng() % 3);
    CongruenceSystem s;
    std::vector<std::pair<long long, u64>> raw;
    for (int i = 0; i < r; ++i) {
      const u64 m = 1 + rng() % 24;
      const long long a = static_cast<long long>(rng() % 61) - 30;
      s.add(a, m);
      raw.push_back({a, m});
    }
    const auto sol = crt_solvable(s);
    const long long scan = oracle::scan_congruences(raw);
    REQUIRE(sol.has_value() == (scan >= 0));
    if (sol) {
      CHECK(sol->residue == static_cast<u64>(scan));
      for (const auto& c : s.congruences()) CHECK(sol->residue % c.modulus == c.residue);
    }
  }
}

TEST_CASE("g predicate values") {
  CHECK(g_predicate(4, 3, 5, 1) == 1);
  CHECK(g_predicate(2, 4, 1, 1) == 0);
  CHECK(g_predicate(2, 1, 2, 1) == 1);
  CHECK(g_predicate(3, 1, 3, 1) == 0);
  CHECK(g_prime_power(3, 2, 0, 0, 1) == 1);
  CHECK(g_prime_power(3, 1, 1, 0, 1) == 0);
  CHECK(g_prime_power(2, 1, 0, 1, 1) == 1);
}

TEST_CASE("g gcd criterion equals crt on the explicit system") {
  for (u64 h = 1; h <= 20; ++h) {
    for (u64 u = 1; u <= 50; ++u) {
      for (u64 v = 1; v <= 50; ++v) {
        for (u64 w = 1; w <= 50; ++w) {
          CongruenceSystem s;
          s.add(-static_cast<i64>(h), u).add(0, v).add(static_cast<i64>(h), w);
          REQUIRE(g_predicate(u, v, w, h) == static_cast<int>(crt_solvable(s).has_value()));
        }
      }
    }
  }
}

TEST_CASE("g on prime powers agrees with the general predicate") {
  for (u64 p : {2, 3, 5, 7}) {
    for (u64 h = 1; h <= 60; ++h) {
      for (unsigned a = 0; a <= 4; ++a) {
        for (unsigned b = 0; b <= 4; ++b) {
          for (unsigned c = 0; c <= 4; ++c) {
            CHECK(g_prime_power(p, a, b, c, h) ==
                  g_predicate(oracle::ipow(p, a), oracle::ipow(p, b), oracle::ipow(p, c), h));
          }
        }
      }
    }
  }
}

TEST_CASE("g and d_k are multiplicative") {
  std::mt19937_64 rng(5);
  const u64 primes[] = {2, 3, 5, 7, 11, 13};
  for (int t = 0; t < 5000; ++t) {
    // split the primes into two disjoint sets and build u, v, w from each
    const unsigned mask = static_cast<unsigned>(rng() % 64);
    u64 a[3] = {1, 1, 1}, b[3] = {1, 1, 1};
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 3; ++j) {
        const unsigned e = static_cast<unsigned>(rng() % 3);
        (mask >> i & 1 ? a : b)[j] *= oracle::ipow(primes[i], e);
      }
    }
    const u64 h = 1 + rng() % 40;
    CHECK(g_predicate(a[0] * b[0], a[1] * b[1], a[2] * b[2], h) ==
          g_predicate(a[0], a[1], a[2], h) * g_predicate(b[0], b[1], b[2], h));
    const unsigned k = 1 + static_cast<unsigned>(rng() % 6);
    CHECK(dk_value(k, factorize(a[0] * b[0])) == dk_value(k, factorize(a[0])) * dk_value(k, factorize(b[0])));
  }
}
