#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppdp/bloom.hpp"
#include "ppdp/crypto.hpp"
#include "ppdp/evidence.hpp"

namespace ppdp {

// Logical day. Advanced only by the clock tick; all store and feed
// operations take it as an explicit argument so runs are deterministic.
using DayIndex = std::uint64_t;

enum class RotationMode {
  capacity,  // rotate when the next insert would exceed n_expected
  periodic,  // rotate when the epoch has been open period_days or longer
};

struct RotationPolicy {
  RotationMode mode{RotationMode::capacity};
  DayIndex period_days{0};  // periodic mode only, >= 1
};

RotationPolicy capacity_policy();
RotationPolicy periodic_policy(DayIndex period_days);

// period_days = ceil(n_expected / files_per_period) * days_per_period.
DayIndex periodic_days_from_rate(std::uint64_t n_expected, std::uint64_t files_per_period,
                                 DayIndex days_per_period = 30);

// One lifetime of a user's filter between rotations. end_day is exclusive
// and empty while the epoch is open; snapshot days of a closed epoch lie in
// [start_day, end_day).
struct EpochInfo {
  std::uint64_t seq{0};
  DayIndex start_day{0};
  std::optional<DayIndex> end_day;
  std::vector<DayIndex> snapshot_days;
};

struct UserConfig {
  BloomParams params;
  RotationPolicy policy;
  DigestVariant variant{DigestVariant::plain};
  std::optional<PublicKey> user_pub;
};

struct IngestReceipt {
  std::uint64_t epoch_seq{0};
  EvidenceDigest digest;
};

struct SnapshotRef {
  std::string user;
  std::uint64_t epoch_seq{0};
  std::vector<std::uint8_t> bytes;
};

// Per-user filter lifecycle over an append-only state directory:
//   users/<urlencoded-user>/meta.json
//   users/<urlencoded-user>/epochs/<seq>/current.bf
//   users/<urlencoded-user>/epochs/<seq>/snapshots/<day>.bf
// Persisted snapshots are never rewritten; replaying the same ingestion
// sequence reproduces them byte-for-byte.
class FilterStore {
 public:
  explicit FilterStore(std::filesystem::path state_dir);

  void register_user(const UserId& user, const BloomParams& params, const RotationPolicy& policy,
                     DigestVariant variant = DigestVariant::plain,
                     std::optional<PublicKey> user_pub = std::nullopt);

  // Applies the rotation check before insertion, so a file never lands in an
  // over-capacity or overdue filter. In signed-variant mode the signature is
  // verified against the user's registered public key.
  IngestReceipt ingest(const UserId& user, std::istream& evidence, DayIndex current_day,
                       const std::optional<Signature>& sig = std::nullopt);

  // Serializes every user's open-epoch filter under current_day. Raises
  // double-snapshot-for-day if any user already has one (idempotence guard).
  std::vector<SnapshotRef> snapshot_all(DayIndex current_day);

  // Epochs intersecting the (inclusive) day range, oldest first.
  std::vector<EpochInfo> get_epochs(
      const UserId& user,
      std::optional<std::pair<DayIndex, DayIndex>> day_range = std::nullopt) const;

  std::vector<UserId> users() const;
  bool has_user(const UserId& user) const;
  UserConfig user_config(const UserId& user) const;

  std::vector<std::uint8_t> snapshot_bytes(const UserId& user, std::uint64_t epoch_seq,
                                           DayIndex day) const;
  bool snapshot_exists(const UserId& user, std::uint64_t epoch_seq, DayIndex day) const;

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path user_dir(const UserId& user) const;

 private:
  struct Meta;
  Meta load_meta(const UserId& user) const;
  void save_meta(const Meta& meta) const;
  BloomFilter load_current(const Meta& meta) const;
  void save_current(const Meta& meta, const BloomFilter& filter) const;
  std::filesystem::path epoch_dir(const UserId& user, std::uint64_t seq) const;
  std::vector<DayIndex> snapshot_days(const UserId& user, std::uint64_t seq) const;

  std::filesystem::path root_;
};

}  // namespace ppdp
