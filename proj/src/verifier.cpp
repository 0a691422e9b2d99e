#include "ppdp/verifier.hpp"

#include <algorithm>

#include "ppdp/errors.hpp"

namespace ppdp {

std::string_view verdict_name(Verdict v) {
  return v == Verdict::positive ? "positive" : "negative";
}

EvidenceDigest Verifier::digest_for(std::istream& evidence, const UserId& user,
                                    const std::optional<Signature>& sig) const {
  auto config = store_.user_config(user);
  if (config.variant == DigestVariant::signed_) {
    if (!sig) raise(Errc::signature_required, "signed-variant user requires a signature");
    auto file_hash = sha256_stream(evidence);
    if (!verify_user_signature(file_hash, *sig, *config.user_pub)) {
      raise(Errc::signature_invalid, "signature does not verify under the user's public key");
    }
    return digest_signed(*sig, user);
  }
  if (sig) raise(Errc::invalid_parameter, "signature supplied for a plain-variant user");
  return digest_plain(evidence, user);
}

MatchResult Verifier::check_membership(std::istream& evidence, const UserId& user, DayIndex day,
                                       const std::optional<Signature>& sig) const {
  return check_digest(digest_for(evidence, user, sig), user, day);
}

MatchResult Verifier::check_digest(const EvidenceDigest& digest, const UserId& user,
                                   DayIndex day) const {
  const DailyProof* record = feed_.find(user.value(), day);
  if (record == nullptr) {
    raise(Errc::missing_record,
          "no feed record for user '" + user.value() + "' day " + std::to_string(day));
  }
  MatchResult result;
  result.user = user.value();
  result.day = day;
  result.epoch_seq = record->epoch_seq;
  result.record = *record;
  result.feed_signature_valid = verify_feed_record(*record, csp_pub_);

  if (!store_.snapshot_exists(user, record->epoch_seq, day)) {
    raise(Errc::snapshot_withheld, "feed record exists but the snapshot for user '" +
                                       user.value() + "' day " + std::to_string(day) +
                                       " is not served");
  }
  auto bytes = store_.snapshot_bytes(user, record->epoch_seq, day);
  if (sha256_bytes(bytes) != record->filter_hash) {
    raise(Errc::attestation_mismatch, "snapshot hash for user '" + user.value() + "' day " +
                                          std::to_string(day) +
                                          " does not match the published filter_hash");
  }
  auto filter = BloomFilter::deserialize(bytes);

  // One single unset bit position means the evidence is not present; a
  // positive additionally requires the record signature to have verified.
  bool all_set = filter.contains(digest);
  result.verdict =
      (all_set && result.feed_signature_valid) ? Verdict::positive : Verdict::negative;
  return result;
}

Verifier::EpochSearch Verifier::search_epochs(
    const EvidenceDigest& digest, const UserId& user,
    std::optional<std::pair<DayIndex, DayIndex>> range) const {
  EpochSearch out;
  for (const auto& epoch : store_.get_epochs(user, range)) {
    // Probe only days that actually have a published record.
    std::vector<DayIndex> days;
    for (DayIndex day : epoch.snapshot_days) {
      if (range && (day < range->first || day > range->second)) continue;
      if (feed_.find(user.value(), day) != nullptr) days.push_back(day);
    }
    if (days.empty()) continue;

    EpochProbe probe{epoch.seq, {}};
    auto positive_at = [&](std::size_t index) {
      probe.probed_days.push_back(days[index]);
      return check_digest(digest, user, days[index]).verdict == Verdict::positive;
    };

    // Membership is monotone across a single epoch's snapshots, so one
    // probe of the newest day decides the epoch and a binary search finds
    // the earliest positive day.
    if (!positive_at(days.size() - 1)) {
      out.trace.push_back(std::move(probe));
      continue;
    }
    std::size_t lo = 0;
    std::size_t hi = days.size() - 1;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (positive_at(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    out.found_day = days[lo];
    out.epoch_seq = epoch.seq;
    out.trace.push_back(std::move(probe));
    return out;
  }
  return out;
}

TimelineResult Verifier::find_generation_time(std::istream& evidence, const UserId& user,
                                              const std::optional<Signature>& sig) const {
  return find_generation_time_digest(digest_for(evidence, user, sig), user);
}

TimelineResult Verifier::find_generation_time_digest(const EvidenceDigest& digest,
                                                     const UserId& user) const {
  if (feed_.for_user(user.value()).empty()) {
    raise(Errc::missing_record, "user '" + user.value() + "' has no published proofs");
  }
  auto search = search_epochs(digest, user, std::nullopt);
  return TimelineResult{search.found_day, search.epoch_seq, std::move(search.trace)};
}

RangeResult Verifier::present_in_range(std::istream& evidence, const UserId& user,
                                       DayIndex from_day, DayIndex to_day,
                                       const std::optional<Signature>& sig) const {
  return present_in_range_digest(digest_for(evidence, user, sig), user, from_day, to_day);
}

RangeResult Verifier::present_in_range_digest(const EvidenceDigest& digest, const UserId& user,
                                              DayIndex from_day, DayIndex to_day) const {
  if (from_day > to_day) {
    raise(Errc::empty_range, "from_day " + std::to_string(from_day) + " exceeds to_day " +
                                 std::to_string(to_day));
  }
  auto search = search_epochs(digest, user, std::make_pair(from_day, to_day));
  return RangeResult{search.found_day.has_value(), search.found_day, std::move(search.trace)};
}

std::optional<DayIndex> Verifier::latest_published_day(const UserId& user) const {
  auto records = feed_.for_user(user.value());
  if (records.empty()) return std::nullopt;
  return records.back()->day;
}

}  // namespace ppdp
