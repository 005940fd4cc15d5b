// Serial reference kernels against their OpenMP versions.
// usage: bench_kernels [x]   (default 1e7)

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "divconv/empirical.hpp"
#include "divconv/sieve.hpp"

using namespace divconv;

namespace {

template <class F>
auto timed(F&& f, double& secs) {
  const auto t0 = std::chrono::steady_clock::now();
  auto out = f();
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

template <class S, class P>
void bench(const char* name, u64 x, S&& serial, P&& parallel) {
  double ts = 0, tp = 0;
  const auto a = timed(serial, ts);
  const auto b = timed(parallel, tp);
  std::printf("%s,%llu,%d,%.4f,%.4f,%.2f,%s\n", name, static_cast<unsigned long long>(x), omp_get_max_threads(), ts,
              tp, ts / tp, a == b ? "yes" : "NO");
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const u64 x = argc > 1 ? static_cast<u64>(std::strtod(argv[1], nullptr)) : 10'000'000;
  if (x < 100) {
    std::fprintf(stderr, "x must be >= 100\n");
    return 2;
  }
  std::puts("kernel,x,threads,serial_s,parallel_s,speedup,agree");
  for (unsigned k : {2u, 3u}) {
    const SieveConfig cfg{1, x + 1, 1u << 16, k};
    const std::string name = "dk_range_k" + std::to_string(k);
    bench(name.c_str(), x, [&] { return dk_range_serial(cfg).values; }, [&] { return dk_range(cfg).values; });
  }
  const DivisorParams p{1, 2, 2, 2};
  bench("triple_sum_222", x, [&] { return triple_convolution_sum_serial(p, x); },
        [&] { return triple_convolution_sum(p, x); });
  bench("shifted_sum_22", x, [&] { return shifted_convolution_sum_serial(2, 2, 1, x); },
        [&] { return shifted_convolution_sum(2, 2, 1, x); });
  return 0;
}
