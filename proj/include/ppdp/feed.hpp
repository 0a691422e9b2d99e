#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ppdp/crypto.hpp"
#include "ppdp/store.hpp"

namespace ppdp {

// One published proof: the daily commitment tuple plus identifying metadata.
// The signed preimage covers (day, epoch, filter_hash, hash_alg, sig_alg,
// user) so a record cannot be replayed for another user or day. The display
// timestamp t is carried for presentation but never signed; the DayIndex is
// the authoritative time.
struct DailyProof {
  std::string user;
  DayIndex day{0};
  std::uint64_t epoch_seq{0};
  std::string hash_alg{kHashAlg};
  std::string sig_alg{kSigAlg};
  std::array<std::uint8_t, 32> filter_hash{};
  Signature sig;
  std::string display_time;
};

// Canonical serialization: one JSON object per line, keys sorted, hex fields
// lowercase. The preimage is the same object minus "sig" and "t".
std::vector<std::uint8_t> record_preimage(const DailyProof& record);
std::string record_to_line(const DailyProof& record);
DailyProof record_from_line(const std::string& line);

// Append-only public feed: feed.jsonl plus the CSP public key in feed.pub.
class ProofFeed {
 public:
  ProofFeed() = default;
  static ProofFeed load(const std::filesystem::path& feed_path);

  const std::vector<DailyProof>& records() const noexcept { return records_; }
  const DailyProof* find(const std::string& user, DayIndex day) const;
  // All of a user's records, ordered by day.
  std::vector<const DailyProof*> for_user(const std::string& user) const;

 private:
  std::vector<DailyProof> records_;
};

// Hashes and signs every user's snapshot for current_day and appends one
// record per user to the feed. Idempotent per (user, day): users already
// published for the day are skipped. Also publishes the CSP public key as
// feed.pub next to the feed on first use. Returns the number appended.
std::size_t publish_day(const FilterStore& store, const std::filesystem::path& feed_path,
                        DayIndex current_day, const SigningKeyPair& csp_key);

// True iff the signature verifies over the record's canonical preimage.
// Malformed records (unknown algorithms) return false rather than throwing.
bool verify_feed_record(const DailyProof& record, const PublicKey& csp_pub);

struct AuditResult {
  std::vector<std::uint8_t> snapshot;
  DailyProof record;
  bool hash_matches{false};
};

// The court procedure: reveal the stored snapshot for (user, day) and check
// that its hash still equals the published, signed filter_hash.
AuditResult audit_reveal(const FilterStore& store, const ProofFeed& feed, const UserId& user,
                         DayIndex day);

}  // namespace ppdp
