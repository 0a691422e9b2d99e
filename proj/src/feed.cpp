#include "ppdp/feed.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ppdp/errors.hpp"
#include "ppdp/util.hpp"

namespace ppdp {

using nlohmann::json;

namespace {

json signed_fields(const DailyProof& r) {
  return json{
      {"day", r.day},
      {"epoch", r.epoch_seq},
      {"filter_hash", to_hex(r.filter_hash)},
      {"hash_alg", r.hash_alg},
      {"sig_alg", r.sig_alg},
      {"user", r.user},
  };
}

const char* const kRecordKeys[] = {"day",      "epoch", "filter_hash", "hash_alg",
                                   "sig",      "sig_alg", "t",         "user"};

}  // namespace

std::vector<std::uint8_t> record_preimage(const DailyProof& record) {
  auto text = signed_fields(record).dump();
  return std::vector<std::uint8_t>(text.begin(), text.end());
}

std::string record_to_line(const DailyProof& record) {
  json j = signed_fields(record);
  j["sig"] = to_hex(record.sig.bytes);
  j["t"] = record.display_time;
  return j.dump();
}

DailyProof record_from_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(Errc::io_error, "malformed feed record");
  for (const char* key : kRecordKeys) {
    if (!j.contains(key)) raise(Errc::io_error, std::string("feed record missing '") + key + "'");
  }
  if (j.size() != std::size(kRecordKeys)) {
    raise(Errc::io_error, "feed record carries unexpected fields");
  }
  DailyProof r;
  r.user = j.at("user").get<std::string>();
  r.day = j.at("day").get<DayIndex>();
  r.epoch_seq = j.at("epoch").get<std::uint64_t>();
  r.hash_alg = j.at("hash_alg").get<std::string>();
  r.sig_alg = j.at("sig_alg").get<std::string>();
  auto fh = from_hex(j.at("filter_hash").get<std::string>());
  if (fh.size() != r.filter_hash.size()) raise(Errc::io_error, "bad filter_hash width");
  std::memcpy(r.filter_hash.data(), fh.data(), fh.size());
  auto sig = from_hex(j.at("sig").get<std::string>());
  if (sig.size() != r.sig.bytes.size()) raise(Errc::io_error, "bad signature width");
  std::memcpy(r.sig.bytes.data(), sig.data(), sig.size());
  r.display_time = j.at("t").get<std::string>();
  return r;
}

ProofFeed ProofFeed::load(const std::filesystem::path& feed_path) {
  ProofFeed feed;
  if (!std::filesystem::exists(feed_path)) return feed;
  std::ifstream in(feed_path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + feed_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      feed.records_.push_back(record_from_line(line));
    } catch (const Error& e) {
      raise(Errc::io_error,
            feed_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return feed;
}

const DailyProof* ProofFeed::find(const std::string& user, DayIndex day) const {
  for (const auto& r : records_) {
    if (r.user == user && r.day == day) return &r;
  }
  return nullptr;
}

std::vector<const DailyProof*> ProofFeed::for_user(const std::string& user) const {
  std::vector<const DailyProof*> out;
  for (const auto& r : records_) {
    if (r.user == user) out.push_back(&r);
  }
  std::sort(out.begin(), out.end(),
            [](const DailyProof* a, const DailyProof* b) { return a->day < b->day; });
  return out;
}

std::size_t publish_day(const FilterStore& store, const std::filesystem::path& feed_path,
                        DayIndex current_day, const SigningKeyPair& csp_key) {
  auto feed = ProofFeed::load(feed_path);
  auto display_time = iso8601_utc_now();
  std::size_t appended = 0;
  for (const auto& user : store.users()) {
    if (feed.find(user.value(), current_day) != nullptr) continue;

    // The epoch that was open at the day's cut is the one holding the
    // day's snapshot.
    std::optional<std::uint64_t> epoch_seq;
    for (const auto& epoch : store.get_epochs(user)) {
      if (std::binary_search(epoch.snapshot_days.begin(), epoch.snapshot_days.end(),
                             current_day)) {
        epoch_seq = epoch.seq;
        break;
      }
    }
    if (!epoch_seq) {
      raise(Errc::missing_snapshot, "no day-" + std::to_string(current_day) +
                                        " snapshot for user '" + user.value() +
                                        "'; run the daily snapshot first");
    }

    DailyProof record;
    record.user = user.value();
    record.day = current_day;
    record.epoch_seq = *epoch_seq;
    record.filter_hash = sha256_bytes(store.snapshot_bytes(user, *epoch_seq, current_day));
    record.display_time = display_time;
    auto preimage = record_preimage(record);
    record.sig = sign_commitment(preimage, csp_key);
    append_line(feed_path, record_to_line(record));
    ++appended;
  }

  auto pub_path = feed_path.parent_path() / "feed.pub";
  if (!std::filesystem::exists(pub_path)) {
    write_file_atomic(pub_path, to_hex(csp_key.public_key()) + "\n");
  }
  return appended;
}

bool verify_feed_record(const DailyProof& record, const PublicKey& csp_pub) {
  if (record.hash_alg != kHashAlg || record.sig_alg != kSigAlg) return false;
  return verify_commitment(record_preimage(record), record.sig, csp_pub);
}

AuditResult audit_reveal(const FilterStore& store, const ProofFeed& feed, const UserId& user,
                         DayIndex day) {
  const DailyProof* record = feed.find(user.value(), day);
  if (record == nullptr) {
    raise(Errc::missing_record, "no feed record for user '" + user.value() + "' day " +
                                    std::to_string(day));
  }
  AuditResult result;
  result.record = *record;
  result.snapshot = store.snapshot_bytes(user, record->epoch_seq, day);
  result.hash_matches = sha256_bytes(result.snapshot) == record->filter_hash;
  return result;
}

}  // namespace ppdp
