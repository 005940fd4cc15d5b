#include "divconv/constants.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "divconv/errors.hpp"
#include "divconv/sieve.hpp"

namespace divconv {

namespace {

BigInt big_pow(u64 base, unsigned e) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

BigInt big_from(u128 v) {
  BigInt hi = static_cast<unsigned long>(static_cast<u64>(v >> 64));
  BigInt lo = static_cast<unsigned long>(static_cast<u64>(v));
  return (hi << 64) + lo;
}

BigInt big_dk(unsigned k, u64 p, unsigned j) { return BigInt(static_cast<unsigned long>(dk_prime_power(k, p, j))); }

Rational ratio(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// 1 - c/p as an exact rational.
Rational one_minus(u64 c, u64 p) {
  return ratio(BigInt(static_cast<unsigned long>(p)) - BigInt(static_cast<unsigned long>(c)),
               BigInt(static_cast<unsigned long>(p)));
}

Rational power(const Rational& q, unsigned e) {
  Rational out(1);
  BigInt num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  return ratio(num, den);
}

// sum_{i=1}^{terms} d_K(p^{base+i}) / p^{base+i}
Rational shifted_series(unsigned K, unsigned base, unsigned terms, u64 p) {
  BigInt num = 0;
  for (unsigned i = 1; i <= terms; ++i) num = num * static_cast<unsigned long>(p) + big_dk(K, p, base + i);
  return ratio(num, big_pow(p, base + terms));
}

// D(i) = d_k(p^i) d_l(p^i) d_m(p^i)
BigInt triple_dk(unsigned k, unsigned l, unsigned m, unsigned ik, unsigned il, unsigned im) {
  return big_dk(k, 0, ik) * big_dk(l, 0, il) * big_dk(m, 0, im);
}

double rounded_up(double bound) { return bound * (1.0 + 1e-12) + std::numeric_limits<double>::denorm_min(); }

void require_prime(u64 p, const char* who) {
  if (!is_prime(p)) throw std::invalid_argument(std::string(who) + ": p must be prime");
}

void require_orders(unsigned k, unsigned l, unsigned m, const char* who) {
  if (k < 2 || l < 2 || m < 2) throw std::invalid_argument(std::string(who) + ": k, l, m must be >= 2");
}

}  // namespace

TruncationBudget TruncationBudget::defaults_for(u64 h) {
  TruncationBudget b;
  unsigned max_alpha = 0;
  if (h >= 1 && h < (u64(1) << 62)) {
    for (const auto& [p, e] : factorize(h).factors()) max_alpha = std::max(max_alpha, e);
  }
  b.exponent_cutoff = max_alpha + 64;
  return b;
}

void TruncationBudget::validate(u64 h) const {
  if (prime_cutoff < 3) throw BudgetError("prime cutoff must be >= 3");
  if (series_cutoff < 4) throw BudgetError("series cutoff must be >= 4");
  if (!(target_abs_tol > 0)) throw BudgetError("target tolerance must be positive");
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  if (h >= (u64(1) << 62)) throw std::invalid_argument("h must be < 2^62");
  for (const auto& [p, e] : factorize(2 * h).factors()) {
    const unsigned alpha = p == 2 ? e - 1 : e;
    if (exponent_cutoff < alpha + 2) {
      throw BudgetError("exponent cutoff " + std::to_string(exponent_cutoff) + " < v_p(h)+2 = " +
                        std::to_string(alpha + 2) + " at p=" + std::to_string(p));
    }
  }
}

EtaPolynomial::EtaPolynomial(unsigned k, unsigned l, unsigned m) : k_(k), l_(l), m_(m) {
  require_orders(k, l, m, "EtaPolynomial");
  auto row = [](unsigned n) {
    std::vector<i64> r(n + 1);
    i64 c = 1;
    for (unsigned i = 0; i <= n; ++i) {
      r[i] = (i % 2 ? -c : c);
      c = c * (n - i) / (i + 1);
    }
    return r;
  };
  a_ = row(k - 1);
  b_ = row(l - 1);
  c_ = row(m - 1);
}

i64 EtaPolynomial::coefficient(unsigned i1, unsigned i2, unsigned i3) const {
  if (i1 >= a_.size() || i2 >= b_.size() || i3 >= c_.size()) return 0;
  const i64 a = a_[i1], b = b_[i2], c = c_[i3];
  i64 out = -2 * a * b * c;
  if (i3 == 0) out += a * b;
  if (i1 == 0) out += b * c;
  if (i2 == 0) out += c * a;
  return out;
}

double EtaPolynomial::abs_sum_nonconstant() const {
  double s = 0;
  for (unsigned i = 0; i < a_.size(); ++i) {
    for (unsigned j = 0; j < b_.size(); ++j) {
      for (unsigned t = 0; t < c_.size(); ++t) {
        if (i + j + t == 0) continue;
        s += std::fabs(static_cast<double>(coefficient(i, j, t)));
      }
    }
  }
  return s;
}

std::vector<i64> EtaPolynomial::diagonal() const {
  std::vector<i64> d(a_.size() + b_.size() + c_.size() - 2, 0);
  for (unsigned i = 0; i < a_.size(); ++i) {
    for (unsigned j = 0; j < b_.size(); ++j) {
      for (unsigned t = 0; t < c_.size(); ++t) d[i + j + t] += coefficient(i, j, t);
    }
  }
  return d;
}

double binomial_tail_bound(unsigned K, unsigned first, u64 p) {
  if (K == 0) return 0.0;
  const double r = (static_cast<double>(K) + first) / ((static_cast<double>(first) + 1) * static_cast<double>(p));
  if (r >= 1.0) {
    throw BudgetError("geometric majorant ratio " + std::to_string(r) + " >= 1 at p=" + std::to_string(p) +
                      " (cutoff too small)");
  }
  const double log_term =
      std::log(static_cast<double>(dk_prime_power(K, p, first))) - first * std::log(static_cast<double>(p));
  return rounded_up(std::exp(log_term) / (1.0 - r));
}

EulerFactorValue eta_factor(u64 p, unsigned k, unsigned l, unsigned m) {
  if (p == 2) throw std::invalid_argument("eta_factor: p = 2 always divides 2h");
  require_prime(p, "eta_factor");
  require_orders(k, l, m, "eta_factor");
  const unsigned n3 = k + l + m - 3;
  const BigInt q = static_cast<unsigned long>(p - 1);
  auto qp = [&](unsigned e) {
    BigInt out;
    mpz_pow_ui(out.get_mpz_t(), q.get_mpz_t(), e);
    return out;
  };
  BigInt num = qp(k + l - 2) * big_pow(p, m - 1) + qp(l + m - 2) * big_pow(p, k - 1) +
               qp(k + m - 2) * big_pow(p, l - 1) - 2 * qp(n3);
  return {ratio(num, big_pow(p, n3)), 0.0};
}

EulerFactorValue c_factor_direct(u64 p, const DivisorParams& params, const TruncationBudget& budget) {
  params.validate();
  require_prime(p, "c_factor_direct");
  if ((2 * params.h) % p) throw std::invalid_argument("c_factor_direct: p must divide 2h");
  const unsigned alpha = vp(p, params.h);
  // g(p^a, p^b, p^c) = 1 iff min(a,b) <= alpha, min(b,c) <= alpha, min(a,c) <= v_p(2h)
  const unsigned alpha_2h = p == 2 ? alpha + 1 : alpha;
  const unsigned V = budget.exponent_cutoff;
  if (V < alpha + 2) {
    throw BudgetError("exponent cutoff " + std::to_string(V) + " < v_p(h)+2 = " + std::to_string(alpha + 2));
  }
  std::vector<u64> ck(V + 1), cl(V + 1), cm(V + 1);
  for (unsigned nu = 0; nu <= V; ++nu) {
    ck[nu] = dk_prime_power(params.k - 1, p, nu);
    cl[nu] = dk_prime_power(params.l - 1, p, nu);
    cm[nu] = dk_prime_power(params.m - 1, p, nu);
  }
  // weight[M] = sum of coefficient products over admissible triples with max = M
  std::vector<u128> weight(V + 1, 0);
  for (unsigned a = 0; a <= V; ++a) {
    for (unsigned b = 0; b <= V; ++b) {
      if (std::min(a, b) > alpha) continue;
      const u128 cab = u128(ck[a]) * cl[b];
      for (unsigned c = 0; c <= V; ++c) {
        if (std::min(b, c) > alpha || std::min(a, c) > alpha_2h) continue;
        u128 term;
        if (__builtin_mul_overflow(cab, u128(cm[c]), &term) ||
            __builtin_add_overflow(weight[std::max({a, b, c})], term, &weight[std::max({a, b, c})])) {
          throw OverflowError("c_factor_direct: 128-bit overflow");
        }
      }
    }
  }
  BigInt num = 0;
  for (unsigned M = 0; M <= V; ++M) num = num * static_cast<unsigned long>(p) + big_from(weight[M]);

  // Omitted triples have exactly one index above V; the other two are at most
  // v_p(2h), and the lcm is p^{that index}.
  const double wk = static_cast<double>(dk_prime_power(params.k, p, alpha_2h));
  const double wl = static_cast<double>(dk_prime_power(params.l, p, alpha_2h));
  const double wm = static_cast<double>(dk_prime_power(params.m, p, alpha_2h));
  const double tail = binomial_tail_bound(params.k - 1, V + 1, p) * wl * wm +
                      binomial_tail_bound(params.l - 1, V + 1, p) * wk * wm +
                      binomial_tail_bound(params.m - 1, V + 1, p) * wk * wl;
  return {ratio(num, big_pow(p, V)), rounded_up(tail)};
}

EulerFactorValue psi_factor_odd(u64 p, unsigned alpha, unsigned k, unsigned l, unsigned m,
                                const TruncationBudget& budget) {
  if (p == 2) throw std::invalid_argument("psi_factor_odd: p must be odd");
  require_prime(p, "psi_factor_odd");
  require_orders(k, l, m, "psi_factor_odd");
  if (alpha < 1) throw std::invalid_argument("psi_factor_odd: alpha must be >= 1");
  const unsigned I = budget.series_cutoff;
  const double T_k = binomial_tail_bound(k, alpha + I + 1, p);
  const double T_l = binomial_tail_bound(l, alpha + I + 1, p);
  const double T_m = binomial_tail_bound(m, alpha + I + 1, p);

  Rational head = 0;
  for (unsigned i = 0; i < alpha; ++i) head += ratio(triple_dk(k, l, m, i, i, i), big_pow(p, i));
  const BigInt dk_a = big_dk(k, p, alpha), dl_a = big_dk(l, p, alpha), dm_a = big_dk(m, p, alpha);
  // Only the shifted slot varies with i; the other two sit at p^alpha.
  Rational bracket = head + Rational(dl_a * dm_a) * shifted_series(k, alpha, I, p) +
                     Rational(dk_a * dm_a) * shifted_series(l, alpha, I, p) +
                     Rational(dk_a * dl_a) * shifted_series(m, alpha, I, p);
  Rational value = one_minus(1, p) * bracket + one_minus(3, p) * ratio(dk_a * dl_a * dm_a, big_pow(p, alpha));
  value.canonicalize();

  const double q = 1.0 - 1.0 / static_cast<double>(p);
  const double tail = q * (dl_a.get_d() * dm_a.get_d() * T_k + dk_a.get_d() * dm_a.get_d() * T_l +
                           dk_a.get_d() * dl_a.get_d() * T_m);
  return {value, rounded_up(tail)};
}

EulerFactorValue psi_factor_two(unsigned alpha, unsigned k, unsigned l, unsigned m, const TruncationBudget& budget) {
  require_orders(k, l, m, "psi_factor_two");
  const unsigned I = budget.series_cutoff;
  const double T_k = binomial_tail_bound(k, alpha + I + 1, 2);
  const double T_l = binomial_tail_bound(l, alpha + I + 1, 2);
  const double T_m = binomial_tail_bound(m, alpha + I + 1, 2);

  const Rational half(1, 2);
  Rational head = 0;
  for (unsigned i = 0; i < alpha; ++i) head += ratio(triple_dk(k, l, m, i, i, i), big_pow(2, i));
  const BigInt dk_a = big_dk(k, 2, alpha), dl_a = big_dk(l, 2, alpha), dm_a = big_dk(m, 2, alpha);
  const BigInt dk_a1 = big_dk(k, 2, alpha + 1), dm_a1 = big_dk(m, 2, alpha + 1);
  const BigInt c_k = dl_a * dm_a1, c_l = dk_a * dm_a, c_m = dk_a1 * dl_a;
  Rational value = half * head + half * (Rational(c_k) * shifted_series(k, alpha, I, 2) +
                                         Rational(c_l) * shifted_series(l, alpha, I, 2) +
                                         Rational(c_m) * shifted_series(m, alpha, I, 2)) -
                   ratio(dk_a1 * dl_a * dm_a1, big_pow(2, alpha + 1));
  value.canonicalize();
  const double tail = 0.5 * (c_k.get_d() * T_k + c_l.get_d() * T_l + c_m.get_d() * T_m);
  return {value, rounded_up(tail)};
}

EulerFactorValue nabla_local_factor(u64 p, const DivisorParams& params, const TruncationBudget& budget) {
  params.validate();
  if ((2 * params.h) % p) return eta_factor(p, params.k, params.l, params.m);
  EulerFactorValue c = c_factor_direct(p, params, budget);
  const Rational scale = power(one_minus(1, p), params.log_power());
  Rational value = c.value * scale;
  value.canonicalize();
  return {value, rounded_up(c.tail_bound * scale.get_d())};
}

long double prime_zeta_two() {
  // sum_p p^-2 = sum_{n >= 1} mu(n)/n log zeta(2n)
  long double sum = 0;
  for (u64 n = 1; n <= 64; ++n) {
    int mu = 1;
    for (const auto& [p, e] : factorize(n).factors()) {
      if (e > 1) {
        mu = 0;
        break;
      }
      mu = -mu;
    }
    if (mu == 0) continue;
    const long double z = boost::math::zeta(static_cast<long double>(2 * n));
    sum += mu * std::log(z) / static_cast<long double>(n);
  }
  return sum;
}

NablaResult nabla_constant(const DivisorParams& params, const TruncationBudget& budget) {
  params.validate();
  budget.validate(params.h);
  NablaResult result;
  result.params = params;
  result.budget = budget;
  const unsigned n3 = params.log_power();
  const u64 P = budget.prime_cutoff;

  const Factorization special = factorize(2 * params.h);
  const EtaPolynomial eta(params.k, params.l, params.m);
  const double A = eta.abs_sum_nonconstant();
  const auto diag = eta.diagonal();
  double B3 = 0;
  for (std::size_t j = 3; j < diag.size(); ++j) B3 += std::fabs(static_cast<double>(diag[j]));
  const double c2 = static_cast<double>(diag.at(2));
  const double Pd = static_cast<double>(P);
  if (A / ((Pd + 1) * (Pd + 1)) > 0.5) {
    throw BudgetError("prime cutoff " + std::to_string(P) + " too small for the eta tail expansion");
  }

  // Special primes: C route, cross-checked against the psi route.
  double special_rel_tail = 0;
  for (const auto& [p, e] : special.factors()) {
    EulerFactorValue c = c_factor_direct(p, params, budget);
    const unsigned alpha = vp(p, params.h);
    EulerFactorValue psi = p == 2 ? psi_factor_two(alpha, params.k, params.l, params.m, budget)
                                  : psi_factor_odd(p, alpha, params.k, params.l, params.m, budget);
    Rational diff = c.value - psi.value;
    const double dev = std::fabs(diff.get_d());
    result.max_route_deviation = std::max(result.max_route_deviation, dev);
    if (dev > c.tail_bound + psi.tail_bound + 1e-300) result.routes_agree = false;

    const Rational scale = power(one_minus(1, p), n3);
    Rational value = c.value * scale;
    value.canonicalize();
    const double tail = rounded_up(c.tail_bound * scale.get_d());
    result.special_factors.push_back({p, value, tail});
    special_rel_tail += std::log1p(tail / value.get_d());
  }

  const auto primes = primes_up_to(P);
  std::vector<PrimeFactorLog> generic(primes.size());
  std::vector<double> logs(primes.size(), 0.0);
  std::vector<char> used(primes.size(), 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const u64 p = primes[i];
    if ((2 * params.h) % p == 0) continue;
    EulerFactorValue f = eta_factor(p, params.k, params.l, params.m);
    Rational t = f.value - 1;
    logs[i] = std::log1p(t.get_d());
    generic[i] = {p, std::move(f.value), 0.0};
    used[i] = 1;
  }

  // Merge generic and special factors in ascending prime order; the log sum
  // runs in that order so the result does not depend on scheduling.
  long double sum = 0, comp = 0;
  auto add = [&](long double v) {
    const long double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  std::size_t s = 0;
  const auto& sp = result.special_factors;
  for (std::size_t i = 0; i <= primes.size(); ++i) {
    const u64 bound = i < primes.size() ? primes[i] : ~u64(0);
    while (s < sp.size() && sp[s].p <= bound) {
      add(std::log(static_cast<long double>(sp[s].factor.get_d())));
      result.per_prime_log.push_back(sp[s]);
      ++s;
    }
    if (i < primes.size() && used[i]) {
      add(logs[i]);
      result.per_prime_log.push_back(std::move(generic[i]));
    }
  }

  // Primes above P: log eta_p = c2 / p^2 + O(p^-3).
  long double partial = 0;
  for (std::uint32_t p : primes) partial += 1.0L / (static_cast<long double>(p) * p);
  long double s2 = prime_zeta_two() - partial;
  for (const auto& [p, e] : special.factors()) {
    if (p > P) s2 -= 1.0L / (static_cast<long double>(p) * p);
  }
  result.prime_tail_estimate = static_cast<double>(c2 * s2);
  add(result.prime_tail_estimate);
  result.prime_tail_bound = (B3 + A * A / Pd) / (2.0 * Pd * Pd) + 1e-16 * std::fabs(c2) + 1e-15 * (1.0 + A);

  result.log_nabla = sum + comp;
  result.nabla = static_cast<double>(std::exp(result.log_nabla));
  const double rel = std::expm1(result.prime_tail_bound + special_rel_tail);
  result.abs_error_bound = rounded_up(result.nabla * rel + 4e-16 * result.nabla);
  return result;
}

double conjecture_main_term(const DivisorParams& params, double x, double nabla) {
  if (!(x > 1.0)) throw std::invalid_argument("main term needs x > 1");
  const double L = std::log(x);
  double denom = 1;
  for (unsigned order : {params.k, params.l, params.m}) {
    for (unsigned i = 2; i < order; ++i) denom *= i;
  }
  return nabla * x * std::pow(L, static_cast<double>(params.log_power())) / denom;
}

double lower_bound_main_term(const DivisorParams& params, double x, double nabla) {
  return conjecture_main_term(params, x, nabla) / std::pow(3.0, static_cast<double>(params.log_power()));
}

TailIdentityCheck check_tail_identity(u64 p, unsigned alpha, unsigned k, unsigned terms) {
  require_prime(p, "check_tail_identity");
  if (k < 2) throw std::invalid_argument("check_tail_identity: k must be >= 2");
  const Rational lhs = shifted_series(k - 1, alpha, terms, p);
  Rational rhs = one_minus(1, p) * shifted_series(k, alpha, terms, p) - ratio(big_dk(k, p, alpha), big_pow(p, alpha + 1));
  rhs.canonicalize();
  Rational diff = lhs - rhs;
  return {lhs.get_d(), rhs.get_d(), std::fabs(diff.get_d())};
}

namespace {

// Substituting y = x^t turns each level into log(x) * int_0^1 I_{r-1}(x^{1-t}) dt,
// whose integrand is smooth in t. `err` receives an absolute error estimate:
// the outer quadrature error plus log(x) times the worst inner error.
double nested_log_integral(unsigned r, double log_x, double rel_tol, double& err) {
  err = 0;
  if (r == 0) return 1.0;
  if (log_x <= 0.0) return 0.0;
  double inner_worst = 0;
  auto f = [&](double t) {
    double e = 0;
    const double v = nested_log_integral(r - 1, (1.0 - t) * log_x, rel_tol, e);
    inner_worst = std::max(inner_worst, e);
    return v;
  };
  double quad_err = 0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, 1.0, 12, rel_tol, &quad_err);
  err = log_x * (quad_err + inner_worst);
  return log_x * v;
}

}  // namespace

QuadratureResult iterated_log_integral(unsigned r, double x, double quadrature_tol) {
  if (r > 6) throw std::invalid_argument("iterated_log_integral: r must be <= 6");
  if (!(x >= 1.0)) throw std::invalid_argument("iterated_log_integral: x must be >= 1");
  if (!(quadrature_tol > 0)) throw std::invalid_argument("iterated_log_integral: tolerance must be positive");
  double err = 0;
  const double v = nested_log_integral(r, std::log(x), std::max(quadrature_tol * 1e-3, 1e-14), err);
  if (err > quadrature_tol) {
    throw BudgetError("quadrature tolerance " + std::to_string(quadrature_tol) + " not reached at depth " +
                      std::to_string(r) + " (estimate " + std::to_string(err) + ")");
  }
  return {v, err};
}

}  // namespace divconv
