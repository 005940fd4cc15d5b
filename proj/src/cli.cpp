#include "divconv/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <new>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "divconv/constants.hpp"
#include "divconv/empirical.hpp"
#include "divconv/errors.hpp"
#include "divconv/expectations.hpp"
#include "divconv/format.hpp"
#include "divconv/sieve.hpp"

namespace divconv {

namespace {

using json = nlohmann::ordered_json;

// Thrown by verify subcommands; maps to exit code 1.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  u64 h = 1;
  unsigned k = 2, l = 2, m = 2;
  std::string x;
  std::vector<std::string> x_grid;
  u64 prime_cutoff = 0;
  unsigned exp_cutoff = 0, series_cutoff = 0;
  double tol = 0;
  std::string format;
  std::string out_path;
  int threads = 0;
  std::string cache_dir;

  u64 h_max = 64;
  unsigned kl_max = 4;
  std::vector<std::string> primes;
  unsigned r = 3;
  u64 p_max = 97;
  bool lower_bound = false;
  bool check_naive = false;
};

u64 parse_count(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  std::size_t pos = 0;
  if (s.find_first_not_of("0123456789") == std::string::npos) {
    const unsigned long long v = std::stoull(s, &pos);
    return v;
  }
  double d = 0;
  try {
    d = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: " + s);
  }
  if (pos != s.size() || !(d >= 0) || d >= 9.2e18 || d != std::floor(d)) {
    throw std::invalid_argument("not a non-negative integer: " + s);
  }
  return static_cast<u64>(d);
}

std::vector<u64> parse_counts(const std::vector<std::string>& items) {
  std::vector<u64> out;
  for (const auto& s : items) out.push_back(parse_count(s));
  return out;
}

DivisorParams params_of(const Options& o) { return {o.h, o.k, o.l, o.m}; }

TruncationBudget budget_of(const Options& o) {
  TruncationBudget b = TruncationBudget::defaults_for(o.h >= 1 ? o.h : 1);
  if (o.prime_cutoff) b.prime_cutoff = o.prime_cutoff;
  if (o.exp_cutoff) b.exponent_cutoff = o.exp_cutoff;
  if (o.series_cutoff) b.series_cutoff = o.series_cutoff;
  if (o.tol > 0) b.target_abs_tol = o.tol;
  return b;
}

// The budget overrides of `o` with the default exponent cutoff for h.
TruncationBudget budget_at(Options o, u64 h) {
  o.h = h;
  return budget_of(o);
}

std::string fmt_or(const Options& o, const char* fallback) { return o.format.empty() ? fallback : o.format; }

json nabla_json(const NablaResult& r) {
  json j;
  j["h"] = r.params.h;
  j["k"] = r.params.k;
  j["l"] = r.params.l;
  j["m"] = r.params.m;
  j["nabla"] = round15(r.nabla);
  j["error_bound"] = round15(r.abs_error_bound);
  j["prime_cutoff"] = r.budget.prime_cutoff;
  j["factors"] = json::array();
  for (const auto& f : r.special_factors) {
    j["factors"].push_back({{"p", f.p},
                            {"value_num", f.factor.get_num().get_str()},
                            {"value_den", f.factor.get_den().get_str()},
                            {"tail", round15(f.tail_bound)}});
  }
  return j;
}

void cmd_constant(const Options& o, std::ostream& os) {
  const NablaResult r = nabla_constant(params_of(o), budget_of(o));
  if (fmt_or(o, "json") == "json") {
    os << nabla_json(r).dump(2) << "\n";
    return;
  }
  os << "h,k,l,m,nabla,error_bound,prime_cutoff\n";
  os << r.params.h << "," << r.params.k << "," << r.params.l << "," << r.params.m << "," << fmt_sci(r.nabla) << ","
     << fmt_sci(r.abs_error_bound) << "," << r.budget.prime_cutoff << "\n";
}

std::vector<u64> grid_of(const Options& o, const char* fallback) {
  if (!o.x_grid.empty()) return parse_counts(o.x_grid);
  return {parse_count(o.x.empty() ? fallback : o.x)};
}

void cmd_triple(const Options& o, std::ostream& os) {
  const DivisorParams params = params_of(o);
  params.validate();
  const auto grid = grid_of(o, "1e6");
  for (u64 x : grid) {
    if (x <= params.h) throw std::invalid_argument("empty range: need x > h (sums run over h < n <= x)");
  }
  const NablaResult nabla = nabla_constant(params, budget_of(o));
  RatioTable table;
  if (!o.cache_dir.empty()) {
    const SieveCache cache(o.cache_dir);
    auto load = [&](unsigned k) { return cache.load_or_compute({1, grid.back() + params.h + 1, 1u << 16, k}); };
    const DkTable tk = load(params.k), tl = load(params.l), tm = load(params.m);
    const auto sums = triple_prefix_sums_from_tables(params, grid, tk, tl, tm);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      RatioRow row{grid[i], params.h, params.k, params.l, params.m, sums[i], 0.0, 0.0};
      RatioRow lower = row;
      row.main_term = conjecture_main_term(params, static_cast<double>(row.x), nabla.nabla);
      row.ratio = static_cast<double>(row.sum) / row.main_term;
      lower.main_term = lower_bound_main_term(params, static_cast<double>(row.x), nabla.nabla);
      lower.ratio = static_cast<double>(lower.sum) / lower.main_term;
      table.rows.push_back(row);
      table.lower_rows.push_back(lower);
    }
  } else {
    table = ratio_table(params, grid, nabla);
  }
  const auto& rows = o.lower_bound ? table.lower_rows : table.rows;
  if (fmt_or(o, "csv") == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"x", r.x},
                     {"h", r.h},
                     {"k", r.k},
                     {"l", r.l},
                     {"m", r.m},
                     {"sum", to_string_u128(r.sum)},
                     {"main_term", round15(r.main_term)},
                     {"ratio", round15(r.ratio)}});
    }
    os << arr.dump(2) << "\n";
    return;
  }
  os << "x,h,k,l,m,sum,main_term,ratio\n";
  for (const auto& r : rows) {
    os << r.x << "," << r.h << "," << r.k << "," << r.l << "," << r.m << "," << to_string_u128(r.sum) << ","
       << fmt_sci(r.main_term) << "," << fmt_sci(r.ratio) << "\n";
  }
}

void cmd_shifted(const Options& o, std::ostream& os) {
  if (o.h < 1) throw std::invalid_argument("h must be >= 1");
  const auto grid = grid_of(o, "1e6");
  const bool ingham = o.k == 2 && o.l == 2;
  const bool as_json = fmt_or(o, "csv") == "json";
  json arr = json::array();
  if (!as_json) os << "x,h,k,l,sum,ingham_main_term,ingham_ratio\n";
  for (u64 x : grid) {
    PairCheck c;
    if (ingham && x >= 10) {
      c = ingham_check(o.h, x);
    } else {
      c.sum = shifted_convolution_sum(o.k, o.l, o.h, x);
    }
    const bool has_main = ingham && x >= 10;
    if (as_json) {
      json row = {{"x", x}, {"h", o.h}, {"k", o.k}, {"l", o.l}, {"sum", to_string_u128(c.sum)}};
      if (has_main) {
        row["ingham_main_term"] = round15(c.main_term);
        row["ingham_ratio"] = round15(c.ratio);
      }
      arr.push_back(row);
    } else {
      os << x << "," << o.h << "," << o.k << "," << o.l << "," << to_string_u128(c.sum) << ","
         << (has_main ? fmt_sci(c.main_term) : "") << "," << (has_main ? fmt_sci(c.ratio) : "") << "\n";
    }
  }
  if (as_json) os << arr.dump(2) << "\n";
}

void cmd_additive(const Options& o, std::ostream& os) {
  const u64 N = parse_count(o.x.empty() ? "1e6" : o.x);
  PairCheck c;
  const bool has_main = N >= 10;
  if (has_main) {
    c = additive_check(N);
  } else {
    c.sum = additive_convolution_sum(N);
  }
  if (fmt_or(o, "csv") == "json") {
    json j = {{"N", N}, {"sum", to_string_u128(c.sum)}};
    if (has_main) {
      j["main_term"] = round15(c.main_term);
      j["ratio"] = round15(c.ratio);
    }
    os << j.dump(2) << "\n";
    return;
  }
  os << "N,sum,main_term,ratio\n"
     << N << "," << to_string_u128(c.sum) << "," << (has_main ? fmt_sci(c.main_term) : "") << ","
     << (has_main ? fmt_sci(c.ratio) : "") << "\n";
}

void cmd_theorem4(const Options& o, std::ostream& os) {
  const u64 x = parse_count(o.x.empty() ? "50" : o.x);
  const Rational v = theorem4_lhs_direct(o.k, o.l, o.m, o.h, x);
  if (o.check_naive) {
    const Rational naive = theorem4_lhs_naive(o.k, o.l, o.m, o.h, x);
    if (naive != v) throw VerificationFailure("optimized and naive triple sums differ");
  }
  if (fmt_or(o, "csv") == "json") {
    os << json{{"h", o.h}, {"k", o.k}, {"l", o.l}, {"m", o.m}, {"x", x},
               {"numerator", v.get_num().get_str()}, {"denominator", v.get_den().get_str()},
               {"value", round15(v.get_d())}}
              .dump(2)
       << "\n";
    return;
  }
  os << "h,k,l,m,x,numerator,denominator,value\n"
     << o.h << "," << o.k << "," << o.l << "," << o.m << "," << x << "," << v.get_num().get_str() << ","
     << v.get_den().get_str() << "," << fmt_sci(v.get_d()) << "\n";
}

std::vector<u64> primes_of(const Options& o, std::vector<u64> fallback) {
  if (o.primes.empty()) return fallback;
  auto ps = parse_counts(o.primes);
  for (u64 p : ps) {
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  }
  return ps;
}

void cmd_expectations(const Options& o, std::ostream& os) {
  const DivisorParams params = params_of(o);
  params.validate();
  const u64 x = parse_count(o.x.empty() ? "1e6" : o.x);
  const auto ps = primes_of(o, {2, 3, 5, 7});
  const TruncationBudget budget = budget_of(o);
  os << expectation_csv_header() << "\n";
  for (u64 p : ps) os << expectation_csv_row(p, params, exp_triple_empirical(p, params, x, budget)) << "\n";
}

void cmd_sieve_cache(const Options& o, std::ostream& os) {
  if (o.cache_dir.empty()) throw std::invalid_argument("sieve-cache needs --cache-dir");
  const u64 x = parse_count(o.x.empty() ? "1e6" : o.x);
  SieveConfig cfg;
  cfg.k = o.k;
  cfg.range_start = 1;
  cfg.range_end = x + 1;
  const SieveCache cache(o.cache_dir);
  const DkTable t = cache.load_or_compute(cfg);
  u128 sum = 0;
  for (u64 v : t.values) sum += v;
  os << "k,range_start,range_end,sum,path\n"
     << t.k << "," << t.offset << "," << t.end() << "," << to_string_u128(sum) << ","
     << cache.path_for(cfg.k, cfg.range_start, cfg.range_end).string() << "\n";
}

std::string case_label(u64 p, u64 h, unsigned k, unsigned l, unsigned m) {
  return "p=" + std::to_string(p) + " h=" + std::to_string(h) + " k=" + std::to_string(k) + " l=" +
         std::to_string(l) + " m=" + std::to_string(m);
}

void verify_c_psi(const Options& o, std::ostream& os) {
  std::size_t cases = 0;
  double max_dev = 0, max_tail = 0;
  for (u64 h = 1; h <= o.h_max; ++h) {
    const TruncationBudget b = budget_at(o, h);
    for (unsigned k = 2; k <= o.kl_max; ++k) {
      for (unsigned l = 2; l <= o.kl_max; ++l) {
        for (unsigned m = 2; m <= o.kl_max; ++m) {
          for (const auto& [p, e] : factorize(2 * h).factors()) {
            const unsigned alpha = vp(p, h);
            const auto c = c_factor_direct(p, {h, k, l, m}, b);
            const auto psi = p == 2 ? psi_factor_two(alpha, k, l, m, b) : psi_factor_odd(p, alpha, k, l, m, b);
            const double dev = std::fabs(Rational(c.value - psi.value).get_d());
            const double bound = c.tail_bound + psi.tail_bound;
            ++cases;
            max_dev = std::max(max_dev, dev);
            max_tail = std::max({max_tail, c.tail_bound, psi.tail_bound});
            if (dev > bound) {
              throw VerificationFailure("FAIL c-psi " + case_label(p, h, k, l, m) + " deviation=" + fmt_sci(dev) +
                                        " bound=" + fmt_sci(bound));
            }
          }
        }
      }
    }
  }
  os << "PASS c-psi cases=" << cases << " max_deviation=" << fmt_sci(max_dev) << " max_tail=" << fmt_sci(max_tail)
     << "\n";
}

void verify_eq_h(const Options& o, std::ostream& os) {
  const double tol = o.tol > 0 ? o.tol : 1e-12;
  double worst = 0;
  std::size_t cases = 0;
  for (u64 p : primes_of(o, {2, 3, 5})) {
    for (unsigned alpha = 0; alpha <= 4; ++alpha) {
      for (unsigned k = 2; k <= 5; ++k) {
        const auto c = check_tail_identity(p, alpha, k, 200);
        ++cases;
        worst = std::max(worst, c.deviation);
        if (c.deviation > tol) {
          throw VerificationFailure("FAIL eq-h p=" + std::to_string(p) + " alpha=" + std::to_string(alpha) +
                                    " k=" + std::to_string(k) + " deviation=" + fmt_sci(c.deviation));
        }
      }
    }
  }
  os << "PASS eq-h cases=" << cases << " max_deviation=" << fmt_sci(worst) << "\n";
}

void verify_routes(const Options& o, std::ostream& os) {
  const auto primes = primes_up_to(o.p_max);
  std::size_t cases = 0;
  double worst = 0;
  for (u64 h = 1; h <= o.h_max; ++h) {
    const TruncationBudget b = budget_at(o, h);
    for (unsigned k = 2; k <= o.kl_max; ++k) {
      for (unsigned l = 2; l <= o.kl_max; ++l) {
        for (unsigned m = 2; m <= o.kl_max; ++m) {
          const DivisorParams params{h, k, l, m};
          for (u64 p : primes) {
            const auto local = nabla_local_factor(p, params, b);
            const auto ratio = expectation_ratio(LocalExpectationQuery::make(p, params), b);
            const double dev = std::fabs(Rational(local.value - ratio.value).get_d());
            ++cases;
            worst = std::max(worst, dev);
            if (dev > local.tail_bound + ratio.tail_bound) {
              throw VerificationFailure("FAIL routes " + case_label(p, h, k, l, m) + " deviation=" + fmt_sci(dev));
            }
          }
        }
      }
    }
  }
  os << "PASS routes cases=" << cases << " max_deviation=" << fmt_sci(worst) << "\n";
}

void verify_expectations(const Options& o, std::ostream& os) {
  const u64 x = parse_count(o.x.empty() ? "1e7" : o.x);
  const double tol = o.tol > 0 ? o.tol : 0.02;
  const std::vector<u64> hs = {1, 2, 3, 4, 6, 8};
  const auto ps = primes_of(o, {2, 3, 5, 7});
  double worst_triple = 0, worst_single = 0;
  std::string first_fail;
  os << expectation_csv_header() << "\n";
  for (u64 p : ps) {
    for (u64 h : hs) {
      for (unsigned k = 2; k <= 3; ++k) {
        for (unsigned l = 2; l <= 3; ++l) {
          for (unsigned m = 2; m <= 3; ++m) {
            const DivisorParams params{h, k, l, m};
            const auto e = exp_triple_empirical(p, params, x, budget_at(o, h));
            os << expectation_csv_row(p, params, e) << "\n";
            worst_triple = std::max(worst_triple, e.rel_error);
            if (e.rel_error > tol && first_fail.empty()) first_fail = "triple " + case_label(p, h, k, l, m);
          }
        }
      }
    }
  }
  os << "p,h,k,slot,x,empirical,closed_form,rel_error\n";
  const std::pair<Slot, const char*> slots[] = {{Slot::plus_h, "+h"}, {Slot::zero, "0"}, {Slot::minus_h, "-h"}};
  for (u64 p : ps) {
    for (u64 h : hs) {
      for (unsigned k = 1; k <= 3; ++k) {
        for (const auto& [slot, name] : slots) {
          const auto e = exp_single_empirical(p, k, h, slot, x);
          os << p << "," << h << "," << k << "," << name << "," << x << "," << fmt_sci(e.value) << ","
             << fmt_sci(e.closed_form) << "," << fmt_sci(e.rel_error) << "\n";
          worst_single = std::max(worst_single, e.rel_error);
          if (e.rel_error > tol / 2 && first_fail.empty()) {
            first_fail = "single p=" + std::to_string(p) + " h=" + std::to_string(h) + " k=" + std::to_string(k);
          }
        }
      }
    }
  }
  if (!first_fail.empty()) {
    os << "FAIL expectations " << first_fail << "\n";
    throw VerificationFailure("FAIL expectations " + first_fail);
  }
  os << "PASS expectations triple_max_rel=" << fmt_sci(worst_triple) << " single_max_rel=" << fmt_sci(worst_single)
     << "\n";
}

void verify_integral(const Options& o, std::ostream& os) {
  const double x = o.x.empty() ? std::numbers::e : std::stod(o.x);
  const double tol = o.tol > 0 ? o.tol : 1e-6;
  const auto q = iterated_log_integral(o.r, x, tol);
  const double exact = std::pow(std::log(x), o.r) / std::tgamma(o.r + 1.0);
  const double dev = std::fabs(q.value - exact);
  const bool ok = dev <= tol;
  os << "r,x,quadrature,closed_form,deviation\n"
     << o.r << "," << fmt_sci(x) << "," << fmt_sci(q.value) << "," << fmt_sci(exact) << "," << fmt_sci(dev) << "\n";
  if (!ok) throw VerificationFailure("FAIL integral deviation=" + fmt_sci(dev));
  os << "PASS integral\n";
}

void verify_g(const Options& o, std::ostream& os) {
  const u64 bound = o.x.empty() ? 50 : parse_count(o.x);
  const u64 h_max = o.h_max;
  std::size_t cases = 0;
  for (u64 h = 1; h <= h_max; ++h) {
    for (u64 u = 1; u <= bound; ++u) {
      for (u64 v = 1; v <= bound; ++v) {
        for (u64 w = 1; w <= bound; ++w) {
          CongruenceSystem sys;
          sys.add(-static_cast<i64>(h), u).add(0, v).add(static_cast<i64>(h), w);
          const int expect = crt_solvable(sys).has_value();
          ++cases;
          if (g_predicate(u, v, w, h) != expect) {
            throw VerificationFailure("FAIL g u=" + std::to_string(u) + " v=" + std::to_string(v) +
                                      " w=" + std::to_string(w) + " h=" + std::to_string(h));
          }
        }
      }
    }
  }
  os << "PASS g cases=" << cases << "\n";
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw ResourceError("cannot open " + o.out_path);
  f << text;
  if (!f) throw ResourceError("failed writing " + o.out_path);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "divconv: generalised divisor convolution sums, their conjectured constant, local expectations.\n"
      "Triple sums run over h < n <= x so that n - h >= 1."};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  app.add_option("--h", o.h, "shift h >= 1");
  app.add_option("--k", o.k, "order of d_k at n + h");
  app.add_option("--l", o.l, "order of d_l at n");
  app.add_option("--m", o.m, "order of d_m at n - h");
  app.add_option("--x", o.x, "upper bound x (accepts 1e7)");
  app.add_option("--x-grid", o.x_grid, "ascending list of x values")->delimiter(',');
  app.add_option("--prime-cutoff", o.prime_cutoff, "P: primes evaluated exactly");
  app.add_option("--exp-cutoff", o.exp_cutoff, "V: max exponent in the direct local sums");
  app.add_option("--series-cutoff", o.series_cutoff, "I: max index in the local series");
  app.add_option("--tol", o.tol, "tolerance (meaning depends on the subcommand)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", o.out_path, "write output to this file");
  app.add_option("--threads", o.threads, "OpenMP threads (0 = all)")->check(CLI::NonNegativeNumber);
  app.add_option("--cache-dir", o.cache_dir, "directory for cached d_k tables");

  auto* constant = app.add_subcommand("constant", "the constant nabla_{h,k,l,m} with error bound");
  auto* triple = app.add_subcommand("triple", "ratio table of T(d_k,d_l,d_m;x,h) against the main term");
  triple->add_flag("--lower-bound", o.lower_bound, "divide the main term by 3^{k+l+m-3}");
  auto* shifted = app.add_subcommand("shifted", "sum_{n<=x} d_k(n+h) d_l(n); Ingham ratio when k = l = 2");
  auto* additive = app.add_subcommand("additive", "sum_{n<N} d(n) d(N-n) with N = --x");
  auto* theorem4 = app.add_subcommand("theorem4", "exact sum of g(u,v,w) d_{k-1} d_{l-1} d_{m-1} / [u,v,w]");
  theorem4->add_flag("--check-naive", o.check_naive, "compare against per-triple CRT solving");
  auto* expectations = app.add_subcommand("expectations", "empirical E(X_p Y_p Z_p) against the closed form");
  expectations->add_option("--p", o.primes, "primes")->delimiter(',');
  auto* sieve_cache = app.add_subcommand("sieve-cache", "build or load the d_k table on [1, x]");

  auto* verify = app.add_subcommand("verify", "verification suites");
  verify->require_subcommand(1);
  auto* v_c_psi = verify->add_subcommand("c-psi", "direct local sums against the psi series");
  auto* v_eq_h = verify->add_subcommand("eq-h", "tail identity for d_{k-1} against d_k");
  auto* v_exp = verify->add_subcommand("expectations", "empirical local expectations");
  auto* v_integral = verify->add_subcommand("integral", "iterated log integral against log^r x / r!");
  auto* v_routes = verify->add_subcommand("routes", "local factors against expectation ratios");
  auto* v_g = verify->add_subcommand("g", "gcd criterion against CRT solvability");
  for (auto* s : {v_c_psi, v_routes, v_g}) s->add_option("--h-max", o.h_max, "largest h");
  for (auto* s : {v_c_psi, v_routes}) s->add_option("--kl-max", o.kl_max, "largest k, l, m");
  for (auto* s : {v_exp, v_eq_h}) s->add_option("--p", o.primes, "primes")->delimiter(',');
  v_integral->add_option("--r", o.r, "depth r <= 6");
  v_routes->add_option("--p-max", o.p_max, "largest prime");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "error: " << msg << "\n";
    return 2;
  }
  // verify defaults differ from the standalone ones
  if (v_routes->parsed() && v_routes->count("--h-max") == 0) o.h_max = 16;
  if (v_g->parsed() && v_g->count("--h-max") == 0) o.h_max = 20;

  std::ostringstream os;
  try {
    if (o.threads > 0) omp_set_num_threads(o.threads);
    if (constant->parsed()) cmd_constant(o, os);
    else if (triple->parsed()) cmd_triple(o, os);
    else if (shifted->parsed()) cmd_shifted(o, os);
    else if (additive->parsed()) cmd_additive(o, os);
    else if (theorem4->parsed()) cmd_theorem4(o, os);
    else if (expectations->parsed()) cmd_expectations(o, os);
    else if (sieve_cache->parsed()) cmd_sieve_cache(o, os);
    else if (v_c_psi->parsed()) verify_c_psi(o, os);
    else if (v_eq_h->parsed()) verify_eq_h(o, os);
    else if (v_exp->parsed()) verify_expectations(o, os);
    else if (v_integral->parsed()) verify_integral(o, os);
    else if (v_routes->parsed()) verify_routes(o, os);
    else if (v_g->parsed()) verify_g(o, os);
    emit(o, os.str(), out);
    return 0;
  } catch (const VerificationFailure& e) {
    try {
      emit(o, os.str(), out);
    } catch (const std::exception&) {
    }
    err << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: number out of range: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace divconv
