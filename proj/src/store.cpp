#include "ppdp/store.hpp"

#include <algorithm>
#include <charconv>

#include <nlohmann/json.hpp>

#include "ppdp/errors.hpp"
#include "ppdp/util.hpp"

namespace ppdp {

using nlohmann::json;

RotationPolicy capacity_policy() { return RotationPolicy{RotationMode::capacity, 0}; }

RotationPolicy periodic_policy(DayIndex period_days) {
  if (period_days < 1) raise(Errc::invalid_parameter, "period_days must be >= 1");
  return RotationPolicy{RotationMode::periodic, period_days};
}

DayIndex periodic_days_from_rate(std::uint64_t n_expected, std::uint64_t files_per_period,
                                 DayIndex days_per_period) {
  if (n_expected < 1 || files_per_period < 1 || days_per_period < 1) {
    raise(Errc::invalid_parameter, "rate parameters must be >= 1");
  }
  return ((n_expected + files_per_period - 1) / files_per_period) * days_per_period;
}

struct FilterStore::Meta {
  std::string user;
  BloomParams params;
  RotationPolicy policy;
  DigestVariant variant{DigestVariant::plain};
  std::optional<PublicKey> user_pub;
  struct Epoch {
    std::uint64_t seq;
    DayIndex start_day;
    std::optional<DayIndex> end_day;
  };
  std::vector<Epoch> epochs;
};

namespace {

json policy_to_json(const RotationPolicy& policy) {
  json j;
  j["mode"] = policy.mode == RotationMode::capacity ? "capacity" : "periodic";
  if (policy.mode == RotationMode::periodic) j["period_days"] = policy.period_days;
  return j;
}

RotationPolicy policy_from_json(const json& j) {
  std::string mode = j.at("mode").get<std::string>();
  if (mode == "capacity") return capacity_policy();
  if (mode == "periodic") return periodic_policy(j.at("period_days").get<DayIndex>());
  raise(Errc::invalid_parameter, "unknown rotation mode '" + mode + "'");
}

}  // namespace

FilterStore::FilterStore(std::filesystem::path state_dir) : root_(std::move(state_dir)) {
  std::filesystem::create_directories(root_ / "users");
}

std::filesystem::path FilterStore::user_dir(const UserId& user) const {
  return root_ / "users" / url_encode(user.value());
}

std::filesystem::path FilterStore::epoch_dir(const UserId& user, std::uint64_t seq) const {
  return user_dir(user) / "epochs" / std::to_string(seq);
}

FilterStore::Meta FilterStore::load_meta(const UserId& user) const {
  auto path = user_dir(user) / "meta.json";
  if (!std::filesystem::exists(path)) {
    raise(Errc::unknown_user, "user '" + user.value() + "' is not registered");
  }
  json j = json::parse(read_file_text(path));
  Meta meta;
  meta.user = j.at("user").get<std::string>();
  const auto& p = j.at("params");
  meta.params = BloomParams{
      p.at("n_expected").get<std::uint64_t>(),
      p.at("p_target").get<double>(),
      p.at("m_bits").get<std::uint64_t>(),
      p.at("k_hashes").get<std::uint16_t>(),
  };
  meta.policy = policy_from_json(j.at("policy"));
  meta.variant = variant_from_name(j.at("variant").get<std::string>());
  if (j.contains("user_pub")) {
    meta.user_pub = public_key_from_hex(j.at("user_pub").get<std::string>());
  }
  for (const auto& e : j.at("epochs")) {
    Meta::Epoch epoch{e.at("seq").get<std::uint64_t>(), e.at("start_day").get<DayIndex>(),
                      std::nullopt};
    if (!e.at("end_day").is_null()) epoch.end_day = e.at("end_day").get<DayIndex>();
    meta.epochs.push_back(epoch);
  }
  if (meta.epochs.empty() || meta.epochs.back().end_day.has_value()) {
    raise(Errc::io_error, "corrupt meta for '" + user.value() + "': no open epoch");
  }
  return meta;
}

void FilterStore::save_meta(const Meta& meta) const {
  json j;
  j["user"] = meta.user;
  j["params"] = {
      {"n_expected", meta.params.n_expected},
      {"p_target", meta.params.p_target},
      {"m_bits", meta.params.m_bits},
      {"k_hashes", meta.params.k_hashes},
  };
  j["policy"] = policy_to_json(meta.policy);
  j["variant"] = std::string(variant_name(meta.variant));
  if (meta.user_pub) j["user_pub"] = to_hex(*meta.user_pub);
  j["epochs"] = json::array();
  for (const auto& e : meta.epochs) {
    json je = {{"seq", e.seq}, {"start_day", e.start_day}};
    if (e.end_day) {
      je["end_day"] = *e.end_day;
    } else {
      je["end_day"] = nullptr;
    }
    j["epochs"].push_back(je);
  }
  write_file_atomic(user_dir(UserId(meta.user)) / "meta.json", j.dump() + "\n");
}

BloomFilter FilterStore::load_current(const Meta& meta) const {
  auto path = epoch_dir(UserId(meta.user), meta.epochs.back().seq) / "current.bf";
  return BloomFilter::deserialize(read_file_bytes(path));
}

void FilterStore::save_current(const Meta& meta, const BloomFilter& filter) const {
  auto dir = epoch_dir(UserId(meta.user), meta.epochs.back().seq);
  std::filesystem::create_directories(dir / "snapshots");
  auto bytes = filter.serialize();
  write_file_atomic(dir / "current.bf", std::span<const std::uint8_t>(bytes));
}

void FilterStore::register_user(const UserId& user, const BloomParams& params,
                                const RotationPolicy& policy, DigestVariant variant,
                                std::optional<PublicKey> user_pub) {
  if (has_user(user)) raise(Errc::duplicate_user, "user '" + user.value() + "' already registered");
  if (policy.mode == RotationMode::periodic && policy.period_days < 1) {
    raise(Errc::invalid_parameter, "period_days must be >= 1");
  }
  if (variant == DigestVariant::signed_ && !user_pub) {
    raise(Errc::invalid_parameter, "signed variant requires the user's public key");
  }
  Meta meta;
  meta.user = user.value();
  meta.params = params;
  meta.policy = policy;
  meta.variant = variant;
  meta.user_pub = user_pub;
  meta.epochs.push_back(Meta::Epoch{0, 0, std::nullopt});
  std::filesystem::create_directories(user_dir(user));
  save_meta(meta);
  save_current(meta, BloomFilter(params));
}

IngestReceipt FilterStore::ingest(const UserId& user, std::istream& evidence,
                                  DayIndex current_day, const std::optional<Signature>& sig) {
  Meta meta = load_meta(user);

  EvidenceDigest digest;
  if (meta.variant == DigestVariant::signed_) {
    if (!sig) raise(Errc::signature_required, "signed-variant user requires a signature");
    auto file_hash = sha256_stream(evidence);
    if (!verify_user_signature(file_hash, *sig, *meta.user_pub)) {
      raise(Errc::signature_invalid, "signature does not verify under the user's public key");
    }
    digest = digest_signed(*sig, user);
  } else {
    if (sig) raise(Errc::invalid_parameter, "signature supplied for a plain-variant user");
    digest = digest_plain(evidence, user);
  }

  auto& open = meta.epochs.back();
  if (current_day < open.start_day) {
    raise(Errc::invalid_parameter, "current_day precedes the open epoch's start");
  }
  BloomFilter filter = load_current(meta);

  bool rotate = meta.policy.mode == RotationMode::capacity
                    ? filter.inserted_count() + 1 > meta.params.n_expected
                    : current_day - open.start_day >= meta.policy.period_days;
  if (rotate) {
    open.end_day = current_day;
    meta.epochs.push_back(Meta::Epoch{open.seq + 1, current_day, std::nullopt});
    filter = BloomFilter(meta.params);
    save_meta(meta);
  }

  filter.insert(digest);
  save_current(meta, filter);
  return IngestReceipt{meta.epochs.back().seq, digest};
}

std::vector<SnapshotRef> FilterStore::snapshot_all(DayIndex current_day) {
  auto all_users = users();
  // Validate before writing anything so the daily cut is all-or-nothing.
  for (const auto& user : all_users) {
    Meta meta = load_meta(user);
    auto days = snapshot_days(user, meta.epochs.back().seq);
    if (!days.empty() && days.back() >= current_day) {
      if (days.back() == current_day) {
        raise(Errc::double_snapshot,
              "user '" + user.value() + "' already has a snapshot for day " +
                  std::to_string(current_day));
      }
      raise(Errc::invalid_parameter, "snapshot day would rewind the clock");
    }
  }
  std::vector<SnapshotRef> out;
  out.reserve(all_users.size());
  for (const auto& user : all_users) {
    Meta meta = load_meta(user);
    auto seq = meta.epochs.back().seq;
    auto bytes = read_file_bytes(epoch_dir(user, seq) / "current.bf");
    auto snap_path = epoch_dir(user, seq) / "snapshots" / (std::to_string(current_day) + ".bf");
    write_file_atomic(snap_path, std::span<const std::uint8_t>(bytes));
    out.push_back(SnapshotRef{user.value(), seq, std::move(bytes)});
  }
  return out;
}

std::vector<DayIndex> FilterStore::snapshot_days(const UserId& user, std::uint64_t seq) const {
  std::vector<DayIndex> days;
  auto dir = epoch_dir(user, seq) / "snapshots";
  if (!std::filesystem::exists(dir)) return days;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto name = entry.path().stem().string();
    DayIndex day = 0;
    auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), day);
    if (ec == std::errc() && ptr == name.data() + name.size() &&
        entry.path().extension() == ".bf") {
      days.push_back(day);
    }
  }
  std::sort(days.begin(), days.end());
  return days;
}

std::vector<EpochInfo> FilterStore::get_epochs(
    const UserId& user, std::optional<std::pair<DayIndex, DayIndex>> day_range) const {
  Meta meta = load_meta(user);
  std::vector<EpochInfo> out;
  for (const auto& e : meta.epochs) {
    if (day_range) {
      auto [lo, hi] = *day_range;
      // Epoch covers [start_day, end_day); the open epoch is unbounded.
      if (e.start_day > hi) continue;
      if (e.end_day && *e.end_day <= lo) continue;
    }
    out.push_back(EpochInfo{e.seq, e.start_day, e.end_day, snapshot_days(user, e.seq)});
  }
  return out;
}

std::vector<UserId> FilterStore::users() const {
  std::vector<UserId> out;
  auto users_dir = root_ / "users";
  if (!std::filesystem::exists(users_dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(users_dir)) {
    auto meta_path = entry.path() / "meta.json";
    if (!std::filesystem::exists(meta_path)) continue;
    json j = json::parse(read_file_text(meta_path));
    out.emplace_back(j.at("user").get<std::string>());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool FilterStore::has_user(const UserId& user) const {
  return std::filesystem::exists(user_dir(user) / "meta.json");
}

UserConfig FilterStore::user_config(const UserId& user) const {
  Meta meta = load_meta(user);
  return UserConfig{meta.params, meta.policy, meta.variant, meta.user_pub};
}

std::vector<std::uint8_t> FilterStore::snapshot_bytes(const UserId& user, std::uint64_t epoch_seq,
                                                      DayIndex day) const {
  auto path = epoch_dir(user, epoch_seq) / "snapshots" / (std::to_string(day) + ".bf");
  if (!std::filesystem::exists(path)) {
    raise(Errc::missing_snapshot, "no snapshot for user '" + user.value() + "' epoch " +
                                      std::to_string(epoch_seq) + " day " + std::to_string(day));
  }
  return read_file_bytes(path);
}

bool FilterStore::snapshot_exists(const UserId& user, std::uint64_t epoch_seq,
                                  DayIndex day) const {
  return std::filesystem::exists(epoch_dir(user, epoch_seq) / "snapshots" /
                                 (std::to_string(day) + ".bf"));
}

}  // namespace ppdp
