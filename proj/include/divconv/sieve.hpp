#pragma once

// Bulk d_k(n) over contiguous ranges. dk_range is the OpenMP-parallel
// segmented kernel; dk_range_serial runs the same kernel on one thread and
// dk_range_oracle is the slow iterated divisor-sum reference.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "divconv/arith.hpp"

namespace divconv {

struct SieveConfig {
  u64 range_start = 1;  // inclusive, >= 1
  u64 range_end = 2;    // exclusive, > range_start, <= 2^32
  u64 segment_size = 1u << 16;
  unsigned k = 2;

  void validate() const;
};

struct DkTable {
  unsigned k = 0;
  u64 offset = 1;
  std::vector<u64> values;  // values[i] = d_k(offset + i)

  u64 end() const { return offset + values.size(); }
  u64 at(u64 n) const { return values.at(n - offset); }
};

// spf[n] is the least prime dividing n for 2 <= n <= limit (spf[0] = spf[1] = 0).
// Throws ResourceError naming the requested size when the allocation fails.
std::vector<std::uint32_t> spf_sieve(u64 limit);

// All primes <= limit, ascending.
std::vector<std::uint32_t> primes_up_to(u64 limit);

// Fills out[i] = d_k(lo + i) for i < hi - lo. `primes` must cover every
// prime <= sqrt(hi - 1); `scratch` is resized as needed. Throws OverflowError
// if an entry would exceed 64 bits.
void sieve_segment(unsigned k, u64 lo, u64 hi, std::span<const std::uint32_t> primes,
                   std::span<u64> out, std::vector<std::uint32_t>& scratch);

DkTable dk_range(const SieveConfig& cfg);
DkTable dk_range_serial(const SieveConfig& cfg);
DkTable dk_range_oracle(const SieveConfig& cfg);

// Binary dump: "DKTB", version u32, k u32, offset u64, length u64, then the
// values, all little-endian.
inline constexpr std::uint32_t kDktbVersion = 1;
void write_dktb(std::ostream& os, const DkTable& table);
DkTable read_dktb(std::istream& is);

// Sieve cache keyed by (k, range); files whose version field differs are
// treated as stale and rebuilt.
class SieveCache {
 public:
  explicit SieveCache(std::filesystem::path dir);

  std::filesystem::path path_for(unsigned k, u64 range_start, u64 range_end) const;
  DkTable load_or_compute(const SieveConfig& cfg) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace divconv
