#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ppdp/evidence.hpp"

namespace ppdp {

// Sizing of a per-user filter. params_for derives k = ceil(log2(1/p)) and
// m = ceil(k*n / ln 2): integer k first, then the half-fill bit count for
// that k. For (n=1000, p=0.01) this gives m=10099, k=7.
struct BloomParams {
  std::uint64_t n_expected{0};
  double p_target{0.0};
  std::uint64_t m_bits{0};
  std::uint16_t k_hashes{0};
};

BloomParams params_for(std::uint64_t n_expected, double p_target);

// (1 - e^(-k*n/m))^k; zero for an empty filter, nondecreasing in n.
double false_positive_rate(std::uint64_t n_inserted, std::uint64_t m_bits,
                           std::uint16_t k_hashes);

// Double-hashing position derivation: the two 16-byte halves of the digest,
// read as unsigned big-endian integers h1 and h2, give position i as
// (h1 + i*h2) mod m for i in [0, k). Pure; duplicates are not re-drawn.
std::vector<std::uint64_t> bit_positions(const EvidenceDigest& digest,
                                         const BloomParams& params);

// Set-only bit array. Bits are never cleared within a filter's lifetime and
// inserted_count counts insert calls, not distinct digests.
class BloomFilter {
 public:
  explicit BloomFilter(BloomParams params);

  const BloomParams& params() const noexcept { return params_; }
  std::uint64_t inserted_count() const noexcept { return inserted_count_; }

  void insert(const EvidenceDigest& digest);
  bool contains(const EvidenceDigest& digest) const;

  bool bit(std::uint64_t index) const;
  std::uint64_t popcount() const;

  // Snapshot wire format (all integers big-endian):
  //   magic "PPDPBF01" | version u16 | m_bits u64 | k_hashes u16 |
  //   n_expected u64 | inserted_count u64 | ceil(m/8) bytes, bit i stored
  //   at byte i/8, bit i%8, LSB-first. Padding bits are zero.
  std::vector<std::uint8_t> serialize() const;
  static BloomFilter deserialize(std::span<const std::uint8_t> bytes);

  // Equality covers exactly the wire-format fields. p_target is sizing
  // configuration, not filter state: it is not serialized, and deserialize
  // reports the canonical 2^-k for the stored k.
  friend bool operator==(const BloomFilter& a, const BloomFilter& b) {
    return a.params_.m_bits == b.params_.m_bits && a.params_.k_hashes == b.params_.k_hashes &&
           a.params_.n_expected == b.params_.n_expected &&
           a.inserted_count_ == b.inserted_count_ && a.bits_ == b.bits_;
  }

  // True when every bit set in this filter is also set in `other`.
  bool subset_of(const BloomFilter& other) const;

 private:
  BloomParams params_;
  std::vector<std::uint8_t> bits_;
  std::uint64_t inserted_count_{0};
};

}  // namespace ppdp
