#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "ppdp/feed.hpp"
#include "ppdp/store.hpp"

namespace ppdp {

enum class Verdict { positive, negative };

std::string_view verdict_name(Verdict v);

// A positive verdict means the whole chain verified: evidence digest ->
// bit positions -> attested snapshot -> published hash -> CSP signature.
// feed_signature_valid=false forces a negative verdict; an unverifiable
// proof never yields a positive.
struct MatchResult {
  Verdict verdict{Verdict::negative};
  std::string user;
  DayIndex day{0};
  std::uint64_t epoch_seq{0};
  DailyProof record;
  bool feed_signature_valid{false};
};

struct EpochProbe {
  std::uint64_t epoch_seq{0};
  std::vector<DayIndex> probed_days;
};

struct TimelineResult {
  std::optional<DayIndex> earliest_day;
  std::optional<std::uint64_t> epoch_seq;
  std::vector<EpochProbe> trace;
};

struct RangeResult {
  bool present{false};
  std::optional<DayIndex> witness_day;
  std::vector<EpochProbe> trace;
};

// Read-only evidence verification against the published feed and the stored
// snapshots. Every membership probe re-attests its snapshot (recomputed hash
// must equal the published one) before any bit is trusted.
class Verifier {
 public:
  Verifier(const FilterStore& store, const ProofFeed& feed, const PublicKey& csp_pub)
      : store_(store), feed_(feed), csp_pub_(csp_pub) {}

  // Variant-aware digest computation. For a signed-variant user the supplied
  // signature must verify under the user's registered public key.
  EvidenceDigest digest_for(std::istream& evidence, const UserId& user,
                            const std::optional<Signature>& sig = std::nullopt) const;

  MatchResult check_membership(std::istream& evidence, const UserId& user, DayIndex day,
                               const std::optional<Signature>& sig = std::nullopt) const;
  MatchResult check_digest(const EvidenceDigest& digest, const UserId& user, DayIndex day) const;

  // Scans epochs oldest-first; within an epoch binary-searches the snapshot
  // days (membership is monotone within an epoch) for the earliest positive
  // day. Rotation resets bits, so the outer loop stays linear.
  TimelineResult find_generation_time(std::istream& evidence, const UserId& user,
                                      const std::optional<Signature>& sig = std::nullopt) const;
  TimelineResult find_generation_time_digest(const EvidenceDigest& digest,
                                             const UserId& user) const;

  RangeResult present_in_range(std::istream& evidence, const UserId& user, DayIndex from_day,
                               DayIndex to_day,
                               const std::optional<Signature>& sig = std::nullopt) const;
  RangeResult present_in_range_digest(const EvidenceDigest& digest, const UserId& user,
                                      DayIndex from_day, DayIndex to_day) const;

  // Latest day with a published record for the user, if any.
  std::optional<DayIndex> latest_published_day(const UserId& user) const;

 private:
  struct EpochSearch {
    std::optional<DayIndex> found_day;
    std::optional<std::uint64_t> epoch_seq;
    std::vector<EpochProbe> trace;
  };
  EpochSearch search_epochs(const EvidenceDigest& digest, const UserId& user,
                            std::optional<std::pair<DayIndex, DayIndex>> range) const;

  const FilterStore& store_;
  const ProofFeed& feed_;
  PublicKey csp_pub_;
};

}  // namespace ppdp
