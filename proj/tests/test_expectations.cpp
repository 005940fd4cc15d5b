#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "divconv/expectations.hpp"
#include "oracles.hpp"

using namespace divconv;

namespace {

TruncationBudget budget(u64 h) { return TruncationBudget::defaults_for(h); }

Rational power(const Rational& q, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= q;
  return r;
}

}  // namespace

TEST_CASE("single expectations closed form") {
  CHECK(exp_single_closed(2, 2) == 2);
  CHECK(exp_single_closed(3, 3) == Rational(9, 4));
  CHECK(exp_single_closed(7, 1) == 1);
}

TEST_CASE("query case tags") {
  CHECK(LocalExpectationQuery::make(2, {6, 2, 2, 2}).tag == LocalCase::two);
  CHECK(LocalExpectationQuery::make(2, {6, 2, 2, 2}).alpha == 1);
  CHECK(LocalExpectationQuery::make(3, {18, 2, 2, 2}).tag == LocalCase::odd_dividing);
  CHECK(LocalExpectationQuery::make(3, {18, 2, 2, 2}).alpha == 2);
  CHECK(LocalExpectationQuery::make(5, {18, 2, 2, 2}).tag == LocalCase::odd_not_dividing);
  CHECK_THROWS_AS(LocalExpectationQuery::make(4, {1, 2, 2, 2}), std::invalid_argument);
}

TEST_CASE("triple expectations closed form") {
  const auto b = budget(1);
  CHECK(exp_triple_closed(LocalExpectationQuery::make(5, {1, 2, 2, 2}), b).value == Rational(7, 4));
  CHECK(exp_triple_closed(LocalExpectationQuery::make(3, {1, 2, 3, 2}), b).value == Rational(13, 4));
  const auto two = exp_triple_closed(LocalExpectationQuery::make(2, {1, 2, 2, 2}), b);
  CHECK(std::fabs(Rational(two.value - Rational(11, 2)).get_d()) <= two.tail_bound + 1e-15);
}

TEST_CASE("odd primes off h give the eta bracket") {
  for (u64 p : {3, 5, 7, 11}) {
    for (unsigned k = 2; k <= 4; ++k) {
      for (unsigned m = 2; m <= 4; ++m) {
        const auto q = LocalExpectationQuery::make(p, {p + 1, k, 3, m});
        const Rational scale = power(Rational(p - 1, p), k + 3 + m - 3);
        CHECK(exp_triple_closed(q, budget(p + 1)).value * scale == eta_factor(p, k, 3, m).value);
      }
    }
  }
}

TEST_CASE("expectation ratios equal the local factors of nabla") {
  for (u64 h = 1; h <= 8; ++h) {
    for (unsigned k = 2; k <= 3; ++k) {
      for (unsigned l = 2; l <= 3; ++l) {
        for (unsigned m = 2; m <= 3; ++m) {
          const DivisorParams params{h, k, l, m};
          for (u64 p : {2, 3, 5, 7, 11, 13, 29, 31}) {
            const auto a = nabla_local_factor(p, params, budget(h));
            const auto r = expectation_ratio(LocalExpectationQuery::make(p, params), budget(h));
            CHECK(std::fabs(Rational(a.value - r.value).get_d()) <= a.tail_bound + r.tail_bound);
          }
        }
      }
    }
  }
}

TEST_CASE("single empirical averages equal direct counting") {
  for (u64 p : {2, 3, 5}) {
    for (unsigned k = 1; k <= 3; ++k) {
      for (u64 h : {1, 4, 9}) {
        const u64 x = 5000;
        u128 s[3] = {0, 0, 0};
        for (u64 n = h + 1; n <= x; ++n) {
          s[0] += oracle::dk(k, oracle::ipow(p, oracle::val(p, n + h)));
          s[1] += oracle::dk(k, oracle::ipow(p, oracle::val(p, n)));
          s[2] += oracle::dk(k, oracle::ipow(p, oracle::val(p, n - h)));
        }
        const Slot slots[] = {Slot::plus_h, Slot::zero, Slot::minus_h};
        for (int i = 0; i < 3; ++i) {
          const auto e = exp_single_empirical(p, k, h, slots[i], x);
          Rational expect(static_cast<unsigned long>(s[i]), static_cast<unsigned long>(x - h));
          expect.canonicalize();
          CHECK(e.exact == expect);
          CHECK(e.count == x - h);
        }
      }
    }
  }
}

TEST_CASE("single empirical averages approach the closed form") {
  CHECK(exp_single_empirical(2, 2, 1, Slot::zero, 1000000).rel_error < 0.01);
  CHECK(exp_single_empirical(3, 2, 1, Slot::zero, 1000000).rel_error < 0.01);
  const auto one = exp_single_empirical(2, 1, 5, Slot::plus_h, 12345);
  CHECK(one.exact == 1);
  CHECK(one.rel_error == 0.0);
  CHECK_THROWS_AS(exp_single_empirical(2, 2, 10, Slot::zero, 10), std::invalid_argument);
}

TEST_CASE("triple empirical averages equal direct counting") {
  for (u64 p : {2, 3, 5}) {
    for (u64 h : {1, 2, 3, 6, 8}) {
      for (unsigned k = 2; k <= 3; ++k) {
        for (unsigned m = 2; m <= 3; ++m) {
          const u64 x = 3000;
          const auto [num, count] = oracle::local_triple_sum(p, h, k, 3, m, x);
          const auto e = exp_triple_empirical(p, {h, k, 3, m}, x);
          Rational expect(static_cast<unsigned long>(num), static_cast<unsigned long>(count));
          expect.canonicalize();
          CHECK(e.exact == expect);
        }
      }
    }
  }
}

TEST_CASE("triple empirical averages at ten million") {
  CHECK(exp_triple_empirical(5, {1, 2, 2, 2}, 10000000).rel_error < 0.02);
  CHECK(exp_triple_empirical(3, {3, 2, 2, 2}, 10000000).rel_error < 0.02);
  CHECK(exp_triple_empirical(2, {2, 2, 2, 2}, 10000000).rel_error < 0.02);
}

TEST_CASE("triple empirical error shrinks with x") {
  for (u64 p : {2, 3, 5, 7}) {
    for (u64 h = 1; h <= 8; ++h) {
      for (unsigned k = 2; k <= 3; ++k) {
        for (unsigned l = 2; l <= 3; ++l) {
          for (unsigned m = 2; m <= 3; ++m) {
            const DivisorParams params{h, k, l, m};
            const auto small = exp_triple_empirical(p, params, 10000);
            const auto large = exp_triple_empirical(p, params, 10000000);
            CHECK(large.rel_error < small.rel_error);
          }
        }
      }
    }
  }
}

TEST_CASE("density estimates") {
  CHECK(density_estimate([](u64 n) { return n % 2 == 0; }, 1000000) == 0.5);
  const double a = density_estimate([](u64 n) { return in_event_a(n, 3, 3, 1, +1); }, 10000000);
  CHECK(std::fabs(a - 2.0 / 27) < 0.02 * 2.0 / 27);
  const double am = density_estimate([](u64 n) { return in_event_a(n, 3, 3, 1, -1); }, 10000000);
  CHECK(std::fabs(am - 2.0 / 27) < 0.02 * 2.0 / 27);
  const double v5 = density_estimate([](u64 n) { return vp(5, n) == 2; }, 10000000);
  CHECK(std::fabs(v5 - 4.0 / 125) < 0.02 * 4.0 / 125);
  CHECK(in_event_a(6, 3, 3, 1, +1));  // 6 = 3 * 2, 2 + 1 = 3
  CHECK_FALSE(in_event_a(12, 3, 3, 1, +1));
  CHECK(in_event_a(12, 3, 3, 1, -1));  // 4 - 1 = 3
  CHECK_FALSE(in_event_a(15, 3, 3, 1, -1));
  CHECK_FALSE(in_event_a(9, 3, 3, 1, +1));
}

TEST_CASE("expectation CSV rows") {
  CHECK(expectation_csv_header() == "p,h,k,l,m,x,empirical,closed_form,rel_error");
  const auto e = exp_triple_empirical(5, {1, 2, 2, 2}, 1000);
  const auto row = expectation_csv_row(5, {1, 2, 2, 2}, e);
  CHECK(row.rfind("5,1,2,2,2,1000,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 8);
}
