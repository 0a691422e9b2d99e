#include "ppdp/bloom.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "ppdp/errors.hpp"
#include "ppdp/util.hpp"

namespace ppdp {

namespace {

constexpr char kMagic[8] = {'P', 'P', 'D', 'P', 'B', 'F', '0', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderSize = 8 + 2 + 8 + 2 + 8 + 8;

std::uint64_t byte_len(std::uint64_t m_bits) { return (m_bits + 7) / 8; }

// Big-endian bytes reduced mod m without overflow; exact for any width.
std::uint64_t mod_be(std::span<const std::uint8_t> bytes, std::uint64_t m) {
  unsigned __int128 r = 0;
  for (auto b : bytes) r = ((r << 8) | b) % m;
  return static_cast<std::uint64_t>(r);
}

void validate_params(const BloomParams& p) {
  if (p.m_bits < 1) raise(Errc::invalid_parameter, "m_bits must be >= 1");
  if (p.k_hashes < 1) raise(Errc::invalid_parameter, "k_hashes must be >= 1");
  if (p.n_expected < 1) raise(Errc::invalid_parameter, "n_expected must be >= 1");
}

}  // namespace

BloomParams params_for(std::uint64_t n_expected, double p_target) {
  if (n_expected < 1) raise(Errc::invalid_parameter, "n_expected must be >= 1");
  if (!(p_target > 0.0) || !(p_target < 1.0)) {
    raise(Errc::invalid_parameter, "p_target must be in (0,1)");
  }
  auto k = static_cast<std::uint16_t>(std::ceil(std::log2(1.0 / p_target)));
  if (k < 1) k = 1;
  long double m_raw = static_cast<long double>(k) * static_cast<long double>(n_expected) /
                      std::log(2.0L);
  auto m = static_cast<std::uint64_t>(std::ceil(m_raw));
  if (m < 1) m = 1;
  return BloomParams{n_expected, p_target, m, k};
}

double false_positive_rate(std::uint64_t n_inserted, std::uint64_t m_bits,
                           std::uint16_t k_hashes) {
  if (m_bits < 1) raise(Errc::invalid_parameter, "m_bits must be >= 1");
  if (k_hashes < 1) raise(Errc::invalid_parameter, "k_hashes must be >= 1");
  double exponent = -static_cast<double>(k_hashes) * static_cast<double>(n_inserted) /
                    static_cast<double>(m_bits);
  return std::pow(1.0 - std::exp(exponent), static_cast<double>(k_hashes));
}

std::vector<std::uint64_t> bit_positions(const EvidenceDigest& digest,
                                         const BloomParams& params) {
  validate_params(params);
  std::span<const std::uint8_t> all(digest.bytes);
  std::uint64_t h1 = mod_be(all.first(16), params.m_bits);
  std::uint64_t h2 = mod_be(all.subspan(16), params.m_bits);
  std::vector<std::uint64_t> positions(params.k_hashes);
  for (std::uint64_t i = 0; i < params.k_hashes; ++i) {
    unsigned __int128 g = h1 + static_cast<unsigned __int128>(i) * h2;
    positions[i] = static_cast<std::uint64_t>(g % params.m_bits);
  }
  return positions;
}

BloomFilter::BloomFilter(BloomParams params) : params_(params) {
  validate_params(params_);
  bits_.assign(byte_len(params_.m_bits), 0);
}

void BloomFilter::insert(const EvidenceDigest& digest) {
  for (auto pos : bit_positions(digest, params_)) {
    bits_[pos >> 3] |= static_cast<std::uint8_t>(1u << (pos & 7));
  }
  ++inserted_count_;
}

bool BloomFilter::contains(const EvidenceDigest& digest) const {
  for (auto pos : bit_positions(digest, params_)) {
    if (!bit(pos)) return false;
  }
  return true;
}

bool BloomFilter::bit(std::uint64_t index) const {
  return (bits_[index >> 3] >> (index & 7)) & 1;
}

std::uint64_t BloomFilter::popcount() const {
  std::uint64_t total = 0;
  for (auto b : bits_) total += std::popcount(b);
  return total;
}

bool BloomFilter::subset_of(const BloomFilter& other) const {
  if (params_.m_bits != other.params_.m_bits) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] & ~other.bits_[i]) return false;
  }
  return true;
}

std::vector<std::uint8_t> BloomFilter::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + bits_.size());
  out.insert(out.end(), kMagic, kMagic + 8);
  put_be16(out, kVersion);
  put_be64(out, params_.m_bits);
  put_be16(out, params_.k_hashes);
  put_be64(out, params_.n_expected);
  put_be64(out, inserted_count_);
  out.insert(out.end(), bits_.begin(), bits_.end());
  return out;
}

BloomFilter BloomFilter::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) raise(Errc::malformed_snapshot, "truncated header");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0) raise(Errc::malformed_snapshot, "bad magic");
  std::uint16_t version = get_be16(bytes, 8);
  if (version != kVersion) {
    raise(Errc::malformed_snapshot, "unsupported version " + std::to_string(version));
  }
  std::uint64_t m = get_be64(bytes, 10);
  std::uint16_t k = get_be16(bytes, 18);
  std::uint64_t n = get_be64(bytes, 20);
  std::uint64_t inserted = get_be64(bytes, 28);
  if (m < 1 || k < 1 || n < 1) raise(Errc::malformed_snapshot, "invalid parameters");
  if (bytes.size() != kHeaderSize + byte_len(m)) {
    raise(Errc::malformed_snapshot, "length does not match m_bits");
  }
  BloomFilter filter(BloomParams{n, std::pow(2.0, -static_cast<double>(k)), m, k});
  std::memcpy(filter.bits_.data(), bytes.data() + kHeaderSize, filter.bits_.size());
  // Bits beyond m_bits must be zero padding.
  if (m % 8 != 0) {
    std::uint8_t mask = static_cast<std::uint8_t>(0xFFu << (m % 8));
    if (filter.bits_.back() & mask) raise(Errc::malformed_snapshot, "nonzero padding bits");
  }
  filter.inserted_count_ = inserted;
  return filter;
}

}  // namespace ppdp
