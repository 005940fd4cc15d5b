#include "divconv/sieve.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <new>
#include <ostream>
#include <stdexcept>
#include <string>

#include "divconv/errors.hpp"

namespace divconv {

namespace {

constexpr u64 kMaxRangeEnd = u64(1) << 32;
constexpr unsigned kMaxExponent = 33;  // 2^33 > kMaxRangeEnd

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

template <class T>
std::vector<T> allocate(u64 count, const char* what) {
  try {
    return std::vector<T>(count);
  } catch (const std::bad_alloc&) {
    throw ResourceError(std::string("cannot allocate ") + what + " of " + std::to_string(count) +
                        " entries (" + std::to_string(count * sizeof(T)) + " bytes)");
  } catch (const std::length_error&) {
    throw ResourceError(std::string("cannot allocate ") + what + " of " + std::to_string(count) +
                        " entries");
  }
}

// Only exponents reachable below `hi` are filled, so large k does not trip
// the overflow check on weights that are never used.
std::array<u64, kMaxExponent + 1> exponent_weights(unsigned k, u64 hi) {
  std::array<u64, kMaxExponent + 1> w{};
  const unsigned top = std::min<unsigned>(kMaxExponent, std::bit_width(hi));
  for (unsigned e = 0; e <= top; ++e) w[e] = dk_prime_power(k, 2, e);
  return w;
}

inline void mul_into(u64& slot, u64 factor) {
  if (__builtin_mul_overflow(slot, factor, &slot)) throw OverflowError("d_k table entry overflows 64 bits");
}

DkTable run_segments(const SieveConfig& cfg, bool parallel) {
  cfg.validate();
  DkTable table;
  table.k = cfg.k;
  table.offset = cfg.range_start;
  table.values = allocate<u64>(cfg.range_end - cfg.range_start, "d_k table");
  const auto primes = primes_up_to(isqrt(cfg.range_end - 1));
  const u64 total = cfg.range_end - cfg.range_start;
  const u64 nseg = (total + cfg.segment_size - 1) / cfg.segment_size;

  bool overflow = false;
#pragma omp parallel if (parallel)
  {
    std::vector<std::uint32_t> scratch;
#pragma omp for schedule(dynamic, 1)
    for (u64 s = 0; s < nseg; ++s) {
      const u64 lo = cfg.range_start + s * cfg.segment_size;
      const u64 hi = std::min(cfg.range_end, lo + cfg.segment_size);
      try {
        sieve_segment(cfg.k, lo, hi, primes,
                      std::span<u64>(table.values).subspan(lo - cfg.range_start, hi - lo), scratch);
      } catch (const OverflowError&) {
#pragma omp atomic write
        overflow = true;
      }
    }
  }
  if (overflow) throw OverflowError("d_k table entry overflows 64 bits");
  return table;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, u64 v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}


u64 get_le(std::istream& is, int bytes) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), bytes)) throw ResourceError("truncated DKTB stream");
  u64 v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

void SieveConfig::validate() const {
  if (range_start < 1) throw std::invalid_argument("range_start must be >= 1");
  if (range_end <= range_start) throw std::invalid_argument("range_end must exceed range_start");
  if (range_end > kMaxRangeEnd) throw std::invalid_argument("range_end must be <= 2^32");
  if (segment_size < 1) throw std::invalid_argument("segment_size must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
}

std::vector<std::uint32_t> spf_sieve(u64 limit) {
  if (limit >= kMaxRangeEnd) throw std::invalid_argument("spf_sieve: limit must be < 2^32");
  auto spf = allocate<std::uint32_t>(limit + 1, "smallest-prime-factor table");
  for (u64 i = 2; i <= limit; ++i) {
    if (spf[i]) continue;
    spf[i] = static_cast<std::uint32_t>(i);
    for (u64 j = i * i; j <= limit; j += i) {
      if (!spf[j]) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

std::vector<std::uint32_t> primes_up_to(u64 limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

void sieve_segment(unsigned k, u64 lo, u64 hi, std::span<const std::uint32_t> primes,
                   std::span<u64> out, std::vector<std::uint32_t>& scratch) {
  const u64 len = hi - lo;
  const auto weight = exponent_weights(k, hi);
  scratch.resize(len);
  // rem[i] holds the part of lo + i not yet divided out.
  std::uint32_t* rem = scratch.data();
  for (u64 i = 0; i < len; ++i) {
    const auto n = static_cast<std::uint32_t>(lo + i);
    const unsigned tz = std::countr_zero(n);
    rem[i] = n >> tz;
    out[i] = weight[tz];
  }
  for (std::uint32_t p : primes) {
    if (p == 2) continue;
    if (u64(p) * p >= hi) break;
    u64 first = (lo + p - 1) / p * p;
    for (u64 n = first; n < hi; n += p) {
      const u64 i = n - lo;
      std::uint32_t r = rem[i] / p;
      unsigned e = 1;
      while (r % p == 0) {
        r /= p;
        ++e;
      }
      rem[i] = r;
      mul_into(out[i], weight[e]);
    }
  }
  // Any cofactor left is a single prime above sqrt(hi).
  const u64 w1 = weight[1];
  for (u64 i = 0; i < len; ++i) {
    if (rem[i] > 1) mul_into(out[i], w1);
  }
}

DkTable dk_range(const SieveConfig& cfg) { return run_segments(cfg, true); }

DkTable dk_range_serial(const SieveConfig& cfg) { return run_segments(cfg, false); }

DkTable dk_range_oracle(const SieveConfig& cfg) {
  cfg.validate();
  if (cfg.range_end > 1'000'001) throw std::invalid_argument("dk_range_oracle: range_end must be <= 10^6 + 1");
  const u64 n_max = cfg.range_end - 1;
  std::vector<u64> cur(n_max + 1, 1), next(n_max + 1);
  cur[0] = 0;
  // d_j = d_{j-1} * 1: next[n] = sum_{a | n} cur[a]
  for (unsigned j = 2; j <= cfg.k; ++j) {
    std::fill(next.begin(), next.end(), 0);
    for (u64 a = 1; a <= n_max; ++a) {
      for (u64 n = a; n <= n_max; n += a) next[n] += cur[a];
    }
    cur.swap(next);
  }
  DkTable table;
  table.k = cfg.k;
  table.offset = cfg.range_start;
  table.values.assign(cur.begin() + cfg.range_start, cur.begin() + cfg.range_end);
  return table;
}

void write_dktb(std::ostream& os, const DkTable& table) {
  os.write("DKTB", 4);
  put_u32(os, kDktbVersion);
  put_u32(os, table.k);
  put_u64(os, table.offset);
  put_u64(os, table.values.size());
  std::vector<char> buf;
  constexpr std::size_t kChunk = 1 << 15;
  for (std::size_t start = 0; start < table.values.size(); start += kChunk) {
    const std::size_t stop = std::min(table.values.size(), start + kChunk);
    buf.resize((stop - start) * 8);
    for (std::size_t i = start; i < stop; ++i) {
      for (int b = 0; b < 8; ++b) buf[(i - start) * 8 + b] = static_cast<char>((table.values[i] >> (8 * b)) & 0xff);
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!os) throw ResourceError("failed writing DKTB stream");
}

DkTable read_dktb(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "DKTB") throw ResourceError("not a DKTB stream");
  const auto version = static_cast<std::uint32_t>(get_le(is, 4));
  if (version != kDktbVersion) {
    throw ResourceError("DKTB version " + std::to_string(version) + " is stale (expected " +
                        std::to_string(kDktbVersion) + ")");
  }
  DkTable table;
  table.k = static_cast<unsigned>(get_le(is, 4));
  table.offset = get_le(is, 8);
  const u64 length = get_le(is, 8);
  table.values = allocate<u64>(length, "DKTB payload");
  std::vector<unsigned char> buf;
  constexpr std::size_t kChunk = 1 << 15;
  for (std::size_t start = 0; start < length; start += kChunk) {
    const std::size_t stop = std::min<std::size_t>(length, start + kChunk);
    buf.resize((stop - start) * 8);
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
      throw ResourceError("truncated DKTB payload");
    }
    for (std::size_t i = start; i < stop; ++i) {
      u64 v = 0;
      for (int b = 7; b >= 0; --b) v = (v << 8) | buf[(i - start) * 8 + b];
      table.values[i] = v;
    }
  }
  return table;
}

SieveCache::SieveCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path SieveCache::path_for(unsigned k, u64 range_start, u64 range_end) const {
  return dir_ / ("dk" + std::to_string(k) + "_" + std::to_string(range_start) + "_" +
                 std::to_string(range_end) + ".dktb");
}

DkTable SieveCache::load_or_compute(const SieveConfig& cfg) const {
  const auto path = path_for(cfg.k, cfg.range_start, cfg.range_end);
  if (std::ifstream in{path, std::ios::binary}) {
    try {
      DkTable cached = read_dktb(in);
      if (cached.k == cfg.k && cached.offset == cfg.range_start && cached.end() == cfg.range_end) return cached;
    } catch (const ResourceError&) {
      // stale or corrupt: rebuilt below
    }
  }
  DkTable table = dk_range(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  std::ofstream out{path, std::ios::binary | std::ios::trunc};
  if (!out) throw ResourceError("cannot write sieve cache " + path.string());
  write_dktb(out, table);
  return table;
}

}  // namespace divconv
