#include "ppdp/scenario.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <random>

#include "ppdp/errors.hpp"
#include "ppdp/feed.hpp"
#include "ppdp/store.hpp"
#include "ppdp/util.hpp"
#include "ppdp/verifier.hpp"

namespace ppdp {

namespace fs = std::filesystem;

namespace {

std::string random_body(std::mt19937_64& rng, std::size_t size = 64) {
  std::string s(size, '\0');
  for (auto& c : s) c = static_cast<char>('!' + rng() % 94);
  return s;
}

SigningKeyPair key_from_rng(std::mt19937_64& rng) {
  std::array<std::uint8_t, 32> seed{};
  for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
  return SigningKeyPair::from_seed(seed);
}

// A live CSP plus a simulated user-storage directory. Deleting from user
// storage never touches the proof store; that separation is the point of
// the scheme.
class Harness {
 public:
  Harness(const std::string& tag, std::uint64_t seed)
      : rng_(seed), root_(make_root(tag)), store_(root_ / "state"), csp_(key_from_rng(rng_)),
        feed_path_(root_ / "state" / "feed.jsonl"), user_storage_(root_ / "user_storage") {
    fs::create_directories(user_storage_);
  }

  ~Harness() {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }

  std::mt19937_64& rng() { return rng_; }
  FilterStore& store() { return store_; }
  const SigningKeyPair& csp() const { return csp_; }
  const fs::path& feed_path() const { return feed_path_; }
  DayIndex today() const { return day_; }

  void register_plain(const std::string& user, std::uint64_t n = 100,
                      RotationPolicy policy = capacity_policy()) {
    store_.register_user(UserId(user), params_for(n, 0.01), policy);
    fs::create_directories(user_storage_ / url_encode(user));
  }

  void register_signed(const std::string& user, const PublicKey& pub) {
    store_.register_user(UserId(user), params_for(100, 0.01), capacity_policy(),
                         DigestVariant::signed_, pub);
    fs::create_directories(user_storage_ / url_encode(user));
  }

  void upload(const std::string& user, const std::string& name, const std::string& content,
              const std::optional<Signature>& sig = std::nullopt) {
    auto path = user_storage_ / url_encode(user) / name;
    write_file_atomic(path, std::string_view(content));
    MemStream s{std::string_view(content)};
    store_.ingest(UserId(user), s.stream(), day_, sig);
  }

  void delete_from_user_storage(const std::string& user, const std::string& name) {
    fs::remove(user_storage_ / url_encode(user) / name);
  }

  bool in_user_storage(const std::string& user, const std::string& name) const {
    return fs::exists(user_storage_ / url_encode(user) / name);
  }

  void tick() {
    store_.snapshot_all(day_);
    publish_day(store_, feed_path_, day_, csp_);
    ++day_;
  }

  ProofFeed feed() const { return ProofFeed::load(feed_path_); }

  fs::path court_copy() {
    auto copy = root_ / "court_feed.jsonl";
    fs::copy_file(feed_path_, copy, fs::copy_options::overwrite_existing);
    return copy;
  }

  fs::path snapshot_path(const std::string& user, std::uint64_t epoch, DayIndex day) const {
    return store_.user_dir(UserId(user)) / "epochs" / std::to_string(epoch) / "snapshots" /
           (std::to_string(day) + ".bf");
  }

  void tamper_snapshot(const std::string& user, std::uint64_t epoch, DayIndex day) {
    auto path = snapshot_path(user, epoch, day);
    auto bytes = read_file_bytes(path);
    bytes.back() ^= 0x01;
    write_file_atomic(path, std::span<const std::uint8_t>(bytes));
  }

  // The dishonest-CSP move: re-hash a (tampered) snapshot and replace the
  // published record with a freshly signed fake.
  void reissue_record(const std::string& user, DayIndex day) {
    auto feed_now = feed();
    std::string rebuilt;
    for (const auto& r : feed_now.records()) {
      DailyProof out = r;
      if (r.user == user && r.day == day) {
        out.filter_hash = sha256_bytes(store_.snapshot_bytes(UserId(user), r.epoch_seq, day));
        out.sig = sign_commitment(record_preimage(out), csp_);
      }
      rebuilt += record_to_line(out) + "\n";
    }
    write_file_atomic(feed_path_, std::string_view(rebuilt));
  }

  Verdict verdict_of(const std::string& user, const std::string& content, DayIndex day,
                     const std::optional<Signature>& sig = std::nullopt) const {
    auto feed_now = feed();
    Verifier v(store_, feed_now, csp_.public_key());
    MemStream s{std::string_view(content)};
    return v.check_membership(s.stream(), UserId(user), day, sig).verdict;
  }

 private:
  static fs::path make_root(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    auto root = fs::temp_directory_path() /
                ("ppdp_scenario_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
    fs::create_directories(root);
    return root;
  }

  std::mt19937_64 rng_;
  fs::path root_;
  FilterStore store_;
  SigningKeyPair csp_;
  fs::path feed_path_;
  fs::path user_storage_;
  DayIndex day_{0};
};

class Collector {
 public:
  explicit Collector(std::string name) { outcome_.name = std::move(name); }

  void expect(const std::string& property, const std::string& description, bool condition) {
    outcome_.assertions.push_back({property, description, condition, false});
  }

  void expect_limitation(const std::string& property, const std::string& description,
                         bool condition) {
    outcome_.assertions.push_back({property, description, condition, true});
  }

  ScenarioOutcome take() { return std::move(outcome_); }

 private:
  ScenarioOutcome outcome_;
};

bool throws_code(Errc code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// ---------------------------------------------------------------------------
// The six named attacks
// ---------------------------------------------------------------------------

ScenarioOutcome denial_of_possession(std::uint64_t seed) {
  Collector c("denial_of_possession");
  Harness h("denial", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "insider.doc", evidence);
  h.tick();

  // The investigator keeps an out-of-band copy; the user wipes her storage.
  h.delete_from_user_storage("alice@cloud.example", "insider.doc");
  c.expect("I1", "file is gone from the user's storage",
           !h.in_user_storage("alice@cloud.example", "insider.doc"));
  c.expect("I1", "deleted file still verifies positive against the published proof",
           h.verdict_of("alice@cloud.example", evidence, 0) == Verdict::positive);
  return c.take();
}

ScenarioOutcome false_presence(std::uint64_t seed) {
  Collector c("false_presence");
  Harness h("false_presence", seed);
  h.register_plain("alice@cloud.example");
  h.upload("alice@cloud.example", "real.doc", random_body(h.rng()));
  h.tick();

  auto planted = random_body(h.rng());
  c.expect("I2", "never-ingested evidence is refuted with a negative match",
           h.verdict_of("alice@cloud.example", planted, 0) == Verdict::negative);
  return c.take();
}

ScenarioOutcome evidence_contamination(std::uint64_t seed) {
  Collector c("evidence_contamination");
  Harness h("contamination", seed);
  h.register_plain("alice@cloud.example");
  auto original = random_body(h.rng());
  h.upload("alice@cloud.example", "ledger.csv", original);
  h.tick();

  auto modified = original;
  modified[0] ^= 0x01;
  c.expect("I3", "a modified copy of the evidence does not verify",
           h.verdict_of("alice@cloud.example", modified, 0) == Verdict::negative);
  c.expect("I3", "the unmodified evidence still verifies",
           h.verdict_of("alice@cloud.example", original, 0) == Verdict::positive);
  return c.take();
}

ScenarioOutcome repudiation_by_csp(std::uint64_t seed) {
  Collector c("repudiation_by_csp");
  Harness h("csp_repud", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "contract.pdf", evidence);
  h.tick();
  auto court = h.court_copy();

  // I4: the CSP cannot deny hosting once the proof is out.
  c.expect("I4", "published proof refutes the CSP's denial of hosting",
           h.verdict_of("alice@cloud.example", evidence, 0) == Verdict::positive);

  // I5: the published record is bound by the CSP signature.
  auto feed = h.feed();
  c.expect("I5", "published record verifies under the CSP public key",
           verify_feed_record(*feed.find("alice@cloud.example", 0), h.csp().public_key()));

  // The CSP substitutes the stored filter after the fact.
  h.tamper_snapshot("alice@cloud.example", 0, 0);
  auto audit = audit_reveal(h.store(), feed, UserId("alice@cloud.example"), 0);
  c.expect("I5", "audit reveals the substituted filter (hash mismatch)", !audit.hash_matches);

  // The CSP even re-signs a fake record for the substituted filter; the
  // court-held feed copy exposes the swap.
  h.reissue_record("alice@cloud.example", 0);
  auto court_feed = ProofFeed::load(court);
  auto fake = h.feed();
  const auto* fake_rec = fake.find("alice@cloud.example", 0);
  const auto* court_rec = court_feed.find("alice@cloud.example", 0);
  c.expect("I5", "re-signed fake record differs from the court-held original",
           fake_rec != nullptr && court_rec != nullptr &&
               record_preimage(*fake_rec) != record_preimage(*court_rec));
  Verifier against_court(h.store(), court_feed, h.csp().public_key());
  MemStream s{std::string_view(evidence)};
  c.expect("I5", "verification against the court copy detects the substitution",
           throws_code(Errc::attestation_mismatch, [&] {
             against_court.check_membership(s.stream(), UserId("alice@cloud.example"), 0);
           }));
  return c.take();
}

ScenarioOutcome repudiation_by_user(std::uint64_t seed) {
  Collector c("repudiation_by_user");
  Harness h("user_repud", seed);
  auto user_key = key_from_rng(h.rng());
  auto neighbor_key = key_from_rng(h.rng());
  h.register_signed("alice@cloud.example", user_key.public_key());

  auto evidence = random_body(h.rng());
  MemStream for_sign{std::string_view(evidence)};
  auto sig = user_sign(for_sign.stream(), user_key);
  h.upload("alice@cloud.example", "tenant.dat", evidence, sig);
  h.tick();

  // Only the holder of the user's private key can have produced the stored
  // signature digest, so "that's my neighbor's data" fails.
  c.expect("I1", "signature-based proof binds possession to the user's own key",
           h.verdict_of("alice@cloud.example", evidence, 0, sig) == Verdict::positive);

  MemStream neighbor_sign{std::string_view(evidence)};
  auto neighbor_sig = user_sign(neighbor_sign.stream(), neighbor_key);
  auto feed = h.feed();
  Verifier v(h.store(), feed, h.csp().public_key());
  auto neighbor_digest = digest_signed(neighbor_sig, UserId("alice@cloud.example"));
  c.expect("I2", "a neighbor's signature over the same file is not in the filter",
           v.check_digest(neighbor_digest, UserId("alice@cloud.example"), 0).verdict ==
               Verdict::negative);
  return c.take();
}

ScenarioOutcome privacy_probe(std::uint64_t seed) {
  Collector c("privacy_probe");
  std::mt19937_64 body_rng(seed);
  auto x = random_body(body_rng);
  auto y = random_body(body_rng);

  // Two histories that differ only in within-day ingestion order publish
  // identical commitments, so the feed leaks neither order nor content.
  Harness h1("privacy_a", seed);
  Harness h2("privacy_b", seed);  // same seed -> same CSP key
  h1.register_plain("alice@cloud.example");
  h2.register_plain("alice@cloud.example");
  h1.upload("alice@cloud.example", "x", x);
  h1.upload("alice@cloud.example", "y", y);
  h2.upload("alice@cloud.example", "y", y);
  h2.upload("alice@cloud.example", "x", x);
  h1.tick();
  h2.tick();

  auto r1 = *h1.feed().find("alice@cloud.example", 0);
  auto r2 = *h2.feed().find("alice@cloud.example", 0);
  c.expect("C2", "reordered ingestion histories publish identical records",
           record_preimage(r1) == record_preimage(r2) && r1.sig == r2.sig);

  auto feed_text = read_file_text(h1.feed_path());
  bool leaked = feed_text.find(x) != std::string::npos || feed_text.find(y) != std::string::npos;
  MemStream sx{std::string_view(x)};
  auto dx = digest_plain(sx.stream(), UserId("alice@cloud.example"));
  leaked = leaked || feed_text.find(to_hex(dx.bytes)) != std::string::npos;
  auto snapshot = h1.store().snapshot_bytes(UserId("alice@cloud.example"), 0, 0);
  leaked = leaked ||
           feed_text.find(to_hex(std::span<const std::uint8_t>(snapshot))) != std::string::npos;
  c.expect("C1", "feed bytes contain no evidence, digest, or filter content", !leaked);
  return c.take();
}

// ---------------------------------------------------------------------------
// The eight collusion combinations (bar = dishonest)
// ---------------------------------------------------------------------------

ScenarioOutcome collusion_c_u_i(std::uint64_t seed) {
  Collector c("c_u_i");
  Harness h("cui", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "f", evidence);
  h.tick();
  c.expect("I1", "honest flow verifies possession",
           h.verdict_of("alice@cloud.example", evidence, 0) == Verdict::positive);
  c.expect("I5", "honest audit reproduces the published hash",
           audit_reveal(h.store(), h.feed(), UserId("alice@cloud.example"), 0).hash_matches);
  return c.take();
}

ScenarioOutcome collusion_cbar_u_i(std::uint64_t seed) {
  Collector c("cbar_u_i");
  Harness h("cbar_ui", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "f", evidence);
  h.tick();

  // A CSP acting alone gains nothing, but if it substitutes the stored
  // filter anyway, the published commitment exposes it.
  h.tamper_snapshot("alice@cloud.example", 0, 0);
  c.expect("I5", "audit detects the CSP's substituted filter",
           !audit_reveal(h.store(), h.feed(), UserId("alice@cloud.example"), 0).hash_matches);
  auto feed = h.feed();
  Verifier v(h.store(), feed, h.csp().public_key());
  MemStream s{std::string_view(evidence)};
  c.expect("I4", "verification fails closed instead of denying possession",
           throws_code(Errc::attestation_mismatch, [&] {
             v.check_membership(s.stream(), UserId("alice@cloud.example"), 0);
           }));
  return c.take();
}

ScenarioOutcome collusion_c_ubar_i(std::uint64_t seed) {
  Collector c("c_ubar_i");
  Harness h("c_ubar_i", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "cp.img", evidence);
  h.tick();
  h.delete_from_user_storage("alice@cloud.example", "cp.img");

  c.expect("I1", "deletion from cloud storage cannot erase the proof",
           h.verdict_of("alice@cloud.example", evidence, 0) == Verdict::positive);
  c.expect("I2", "the user cannot substitute different content as 'what I had'",
           h.verdict_of("alice@cloud.example", random_body(h.rng()), 0) == Verdict::negative);
  auto altered = evidence;
  altered.back() ^= 0x7F;
  c.expect("I3", "an altered copy of the deleted file does not verify",
           h.verdict_of("alice@cloud.example", altered, 0) == Verdict::negative);
  return c.take();
}

ScenarioOutcome collusion_c_u_ibar(std::uint64_t seed) {
  Collector c("c_u_ibar");
  Harness h("c_u_ibar", seed);
  h.register_plain("alice@cloud.example");
  auto real = random_body(h.rng());
  h.upload("alice@cloud.example", "genuine.txt", real);
  h.tick();

  c.expect("I2", "an investigator's planted evidence is refuted",
           h.verdict_of("alice@cloud.example", random_body(h.rng()), 0) == Verdict::negative);
  c.expect("I1", "the user can still prove the evidence the investigator denies",
           h.verdict_of("alice@cloud.example", real, 0) == Verdict::positive);
  auto doctored = real + "!";
  c.expect("I3", "a doctored version of genuine evidence is refuted",
           h.verdict_of("alice@cloud.example", doctored, 0) == Verdict::negative);
  return c.take();
}

ScenarioOutcome collusion_c_ubar_ibar(std::uint64_t seed) {
  Collector c("c_ubar_ibar");
  Harness h("c_ubar_ibar", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "exhibit", evidence);
  h.tick();

  // User and investigator collude, but the honest CSP's proof stands.
  h.delete_from_user_storage("alice@cloud.example", "exhibit");
  c.expect("I1", "colluding user+investigator cannot remove published evidence",
           h.verdict_of("alice@cloud.example", evidence, 0) == Verdict::positive);
  c.expect("I2", "colluding user+investigator cannot plant evidence",
           h.verdict_of("alice@cloud.example", random_body(h.rng()), 0) == Verdict::negative);
  auto altered = evidence;
  altered[1] ^= 0x10;
  c.expect("I3", "colluding user+investigator cannot pass off altered evidence",
           h.verdict_of("alice@cloud.example", altered, 0) == Verdict::negative);
  return c.take();
}

ScenarioOutcome collusion_cbar_u_ibar(std::uint64_t seed) {
  Collector c("cbar_u_ibar");
  Harness h("cbar_u_ibar", seed);
  h.register_plain("alice@cloud.example");
  h.upload("alice@cloud.example", "prior.txt", random_body(h.rng()));
  h.tick();  // day 0 published honestly; collusion starts afterwards

  auto planted = random_body(h.rng());
  c.expect("I2", "pre-collusion proofs refute evidence planted later",
           h.verdict_of("alice@cloud.example", planted, 0) == Verdict::negative);

  // Post-collusion the dishonest CSP happily ingests the investigator's
  // fabrication; plain-variant proofs cannot stop that going forward.
  h.upload("alice@cloud.example", "planted.txt", planted);
  h.tick();
  c.expect_limitation("I2",
                      "plain variant: post-collusion planting succeeds (documented limitation)",
                      h.verdict_of("alice@cloud.example", planted, 1) == Verdict::positive);

  // The signature-based variant blocks even that: neither the CSP nor the
  // investigator can sign with the user's private key.
  Harness hs("cbar_u_ibar_signed", seed + 1);
  auto user_key = key_from_rng(hs.rng());
  auto colluder_key = key_from_rng(hs.rng());
  hs.register_signed("alice@cloud.example", user_key.public_key());
  auto real = random_body(hs.rng());
  MemStream for_sign{std::string_view(real)};
  hs.upload("alice@cloud.example", "real", real, user_sign(for_sign.stream(), user_key));
  hs.tick();

  auto fabricated = random_body(hs.rng());
  MemStream colluder_sign{std::string_view(fabricated)};
  auto forged = user_sign(colluder_sign.stream(), colluder_key);
  c.expect("I2", "signed variant: forged signature cannot establish planted evidence",
           throws_code(Errc::signature_invalid, [&] {
             auto feed = hs.feed();
             Verifier v(hs.store(), feed, hs.csp().public_key());
             MemStream s{std::string_view(fabricated)};
             v.check_membership(s.stream(), UserId("alice@cloud.example"), 0, forged);
           }));
  return c.take();
}

ScenarioOutcome collusion_cbar_ubar_i(std::uint64_t seed) {
  Collector c("cbar_ubar_i");
  Harness h("cbar_ubar_i", seed);
  h.register_plain("alice@cloud.example", 2);  // small capacity, rotations happen
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "secret", evidence);
  h.tick();
  auto court = h.court_copy();

  // Collusion: the user deletes and the CSP "forgets" going forward by
  // rotating to a fresh filter that never re-ingests the file.
  h.delete_from_user_storage("alice@cloud.example", "secret");
  h.upload("alice@cloud.example", "pad1", random_body(h.rng()));
  h.upload("alice@cloud.example", "pad2", random_body(h.rng()));
  h.upload("alice@cloud.example", "pad3", random_body(h.rng()));  // forces epoch 1
  h.tick();

  auto court_feed = ProofFeed::load(court);
  Verifier v(h.store(), court_feed, h.csp().public_key());
  MemStream s{std::string_view(evidence)};
  c.expect("I1", "pre-collusion proof still detects the deleted file",
           v.check_membership(s.stream(), UserId("alice@cloud.example"), 0).verdict ==
               Verdict::positive);

  // Data the user owns only after the collusion point is simply never
  // committed; its absence is undetectable by construction.
  auto post = random_body(h.rng());
  c.expect_limitation("I1",
                      "post-collusion acquisitions are not covered (documented limitation)",
                      h.verdict_of("alice@cloud.example", post, 1) == Verdict::negative);
  return c.take();
}

ScenarioOutcome collusion_cbar_ubar_ibar(std::uint64_t seed) {
  Collector c("cbar_ubar_ibar");
  Harness h("all_dishonest", seed);
  h.register_plain("alice@cloud.example");
  auto evidence = random_body(h.rng());
  h.upload("alice@cloud.example", "exhibit", evidence);
  h.tick();
  auto court = h.court_copy();

  // Even with all three colluding, already-published proofs bind.
  auto fabricated = random_body(h.rng());
  c.expect("I2", "no invalid evidence verifies against an already-published proof",
           h.verdict_of("alice@cloud.example", fabricated, 0) == Verdict::negative);

  h.tamper_snapshot("alice@cloud.example", 0, 0);
  h.reissue_record("alice@cloud.example", 0);
  auto court_feed = ProofFeed::load(court);
  auto live_feed = h.feed();
  const auto* original = court_feed.find("alice@cloud.example", 0);
  const auto* rewritten = live_feed.find("alice@cloud.example", 0);
  c.expect("I5", "rewriting history is visible against the court-held feed",
           original != nullptr && rewritten != nullptr &&
               record_preimage(*original) != record_preimage(*rewritten));

  // New evidence after the collusion point can be altered at will; only
  // the pre-collusion record base stays trustworthy.
  auto late = random_body(h.rng());
  h.upload("alice@cloud.example", "late", late);
  h.tick();
  auto altered_late = late;
  altered_late[0] ^= 0x01;
  c.expect_limitation("I3",
                      "post-collusion evidence can be altered before commitment "
                      "(documented limitation)",
                      h.verdict_of("alice@cloud.example", altered_late, 1) == Verdict::negative);
  return c.take();
}

const std::map<std::string, ScenarioOutcome (*)(std::uint64_t)>& registry() {
  static const std::map<std::string, ScenarioOutcome (*)(std::uint64_t)> map = {
      {"denial_of_possession", denial_of_possession},
      {"false_presence", false_presence},
      {"evidence_contamination", evidence_contamination},
      {"repudiation_by_csp", repudiation_by_csp},
      {"repudiation_by_user", repudiation_by_user},
      {"privacy_probe", privacy_probe},
      {"c_u_i", collusion_c_u_i},
      {"cbar_u_i", collusion_cbar_u_i},
      {"c_ubar_i", collusion_c_ubar_i},
      {"c_u_ibar", collusion_c_u_ibar},
      {"c_ubar_ibar", collusion_c_ubar_ibar},
      {"cbar_u_ibar", collusion_cbar_u_ibar},
      {"cbar_ubar_i", collusion_cbar_ubar_i},
      {"cbar_ubar_ibar", collusion_cbar_ubar_ibar},
  };
  return map;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

ScenarioOutcome run_scenario(const std::string& name, std::uint64_t seed) {
  auto it = registry().find(name);
  if (it == registry().end()) raise(Errc::unknown_scenario, "no scenario named '" + name + "'");
  return it->second(seed);
}

std::vector<ScenarioOutcome> run_all_scenarios(std::uint64_t seed) {
  std::vector<ScenarioOutcome> out;
  for (const auto& [name, fn] : registry()) out.push_back(fn(seed));
  return out;
}

}  // namespace ppdp
