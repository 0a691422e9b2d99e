#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ppdp/errors.hpp"
#include "ppdp/verifier.hpp"
#include "test_support.hpp"

using namespace ppdp;

namespace {

// A CSP-side world with a deterministic day loop.
struct World {
  TempDir dir;
  FilterStore store;
  SigningKeyPair csp;
  std::filesystem::path feed_path;

  explicit World(const std::string& tag)
      : dir(tag), store(dir.path()), csp(test_csp_key()), feed_path(dir.path() / "feed.jsonl") {}

  void add_user(const std::string& user, std::uint64_t n = 100,
                RotationPolicy policy = capacity_policy()) {
    store.register_user(UserId(user), params_for(n, 0.01), policy);
  }

  void ingest(const std::string& user, std::string_view text, DayIndex day) {
    MemStream s{text};
    store.ingest(UserId(user), s.stream(), day);
  }

  void tick(DayIndex day) {
    store.snapshot_all(day);
    publish_day(store, feed_path, day, csp);
  }

  ProofFeed feed() const { return ProofFeed::load(feed_path); }
};

MatchResult check(const Verifier& v, const std::string& user, std::string_view text,
                  DayIndex day) {
  MemStream s{text};
  return v.check_membership(s.stream(), UserId(user), day);
}

}  // namespace

TEST_CASE("membership holds from the ingestion day onward within an epoch") {
  World w("fwd");
  w.add_user("a@b.c");
  for (DayIndex day = 0; day <= 5; ++day) {
    if (day == 2) w.ingest("a@b.c", "exhibit", day);
    w.tick(day);
  }
  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());

  CHECK(check(v, "a@b.c", "exhibit", 5).verdict == Verdict::positive);
  CHECK(check(v, "a@b.c", "exhibit", 2).verdict == Verdict::positive);
  CHECK(check(v, "a@b.c", "exhibit", 1).verdict == Verdict::negative);
  CHECK(check(v, "a@b.c", "exhibit", 0).verdict == Verdict::negative);

  auto result = check(v, "a@b.c", "exhibit", 5);
  CHECK(result.feed_signature_valid);
  CHECK(result.epoch_seq == 0);
  CHECK(result.user == "a@b.c");
}

TEST_CASE("never-ingested evidence is negative at the documented rate") {
  World w("negative");
  w.add_user("a@b.c", 1000);
  std::mt19937_64 rng(5150);
  for (int i = 0; i < 1000; ++i) w.ingest("a@b.c", random_content(rng, 48), 0);
  w.tick(0);
  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());

  int positives = 0;
  const int probes = 2000;
  for (int i = 0; i < probes; ++i) {
    if (check(v, "a@b.c", random_content(rng, 48), 0).verdict == Verdict::positive) ++positives;
  }
  // Bound at twice the analytic rate for the full filter.
  double bound = 2.0 * false_positive_rate(1000, 10099, 7);
  CHECK(static_cast<double>(positives) / probes <= bound);
}

TEST_CASE("verification errors are distinct and precise") {
  World w("errors");
  w.add_user("a@b.c");
  w.ingest("a@b.c", "exhibit", 0);
  w.tick(0);
  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());

  // No record for an unpublished day.
  CHECK_THROWS_WITH_AS(check(v, "a@b.c", "exhibit", 7), doctest::Contains("missing-record"),
                       Error);

  // Record exists but the snapshot is withheld.
  auto snap = w.store.user_dir(UserId("a@b.c")) / "epochs" / "0" / "snapshots" / "0.bf";
  auto original = read_file_bytes(snap);
  std::filesystem::remove(snap);
  CHECK_THROWS_WITH_AS(check(v, "a@b.c", "exhibit", 0), doctest::Contains("snapshot-withheld"),
                       Error);

  // Snapshot restored but altered: attestation must fail closed.
  auto tampered = original;
  tampered[40] ^= 0x02;
  write_file_atomic(snap, std::span<const std::uint8_t>(tampered));
  CHECK_THROWS_WITH_AS(check(v, "a@b.c", "exhibit", 0),
                       doctest::Contains("attestation-mismatch"), Error);

  // Honest bytes restored: verification works again.
  write_file_atomic(snap, std::span<const std::uint8_t>(original));
  CHECK(check(v, "a@b.c", "exhibit", 0).verdict == Verdict::positive);
}

TEST_CASE("an unverifiable feed record never yields a positive") {
  World w("badfeed");
  w.add_user("a@b.c");
  w.ingest("a@b.c", "exhibit", 0);
  w.tick(0);
  auto feed = w.feed();
  Verifier wrong_key(w.store, feed, test_user_key().public_key());
  auto result = check(wrong_key, "a@b.c", "exhibit", 0);
  CHECK_FALSE(result.feed_signature_valid);
  CHECK(result.verdict == Verdict::negative);
}

TEST_CASE("find_generation_time locates the earliest day") {
  World w("timeline");
  w.add_user("a@b.c");
  for (DayIndex day = 0; day <= 9; ++day) {
    if (day == 3) w.ingest("a@b.c", "exhibit", day);
    w.tick(day);
  }
  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());

  MemStream s{std::string_view("exhibit")};
  auto timeline = v.find_generation_time(s.stream(), UserId("a@b.c"));
  REQUIRE(timeline.earliest_day.has_value());
  CHECK(*timeline.earliest_day == 3);
  CHECK(*timeline.epoch_seq == 0);

  // Binary search probes O(log d) days, not all of them.
  std::size_t probes = 0;
  for (const auto& t : timeline.trace) probes += t.probed_days.size();
  CHECK(probes <= 5);  // 10 days -> newest-day probe + ceil(log2(10)) bisection

  MemStream none{std::string_view("never seen")};
  auto missing = v.find_generation_time(none.stream(), UserId("a@b.c"));
  CHECK_FALSE(missing.earliest_day.has_value());
}

TEST_CASE("re-ingestion in a later epoch still reports the oldest epoch") {
  World w("reingest");
  w.add_user("a@b.c", 2, capacity_policy());
  // epoch 0: exhibit + filler; epoch 1: filler2 + filler3; epoch 2: exhibit again
  w.ingest("a@b.c", "exhibit", 0);
  w.ingest("a@b.c", "filler", 0);
  w.tick(0);
  w.ingest("a@b.c", "filler2", 1);
  w.ingest("a@b.c", "filler3", 1);
  w.tick(1);
  w.ingest("a@b.c", "exhibit", 2);
  w.tick(2);

  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());
  MemStream s{std::string_view("exhibit")};
  auto timeline = v.find_generation_time(s.stream(), UserId("a@b.c"));
  REQUIRE(timeline.earliest_day.has_value());
  CHECK(*timeline.earliest_day == 0);
  CHECK(*timeline.epoch_seq == 0);
}

TEST_CASE("timeline with no published days is a missing-record error") {
  World w("nopub");
  w.add_user("a@b.c");
  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());
  MemStream s{std::string_view("x")};
  CHECK_THROWS_WITH_AS(v.find_generation_time(s.stream(), UserId("a@b.c")),
                       doctest::Contains("missing-record"), Error);
}

TEST_CASE("present_in_range follows the spec examples") {
  World w("range");
  w.add_user("a@b.c");
  for (DayIndex day = 0; day <= 7; ++day) {
    if (day == 3) w.ingest("a@b.c", "exhibit", day);
    w.tick(day);
  }
  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());

  {
    MemStream s{std::string_view("exhibit")};
    auto r = v.present_in_range(s.stream(), UserId("a@b.c"), 0, 2);
    CHECK_FALSE(r.present);
  }
  {
    MemStream s{std::string_view("exhibit")};
    auto r = v.present_in_range(s.stream(), UserId("a@b.c"), 2, 7);
    CHECK(r.present);
    REQUIRE(r.witness_day.has_value());
    CHECK(*r.witness_day == 3);
  }
  {
    // Range beyond any published day: false, not an error.
    MemStream s{std::string_view("exhibit")};
    auto r = v.present_in_range(s.stream(), UserId("a@b.c"), 50, 60);
    CHECK_FALSE(r.present);
  }
  {
    MemStream s{std::string_view("exhibit")};
    CHECK_THROWS_WITH_AS(v.present_in_range(s.stream(), UserId("a@b.c"), 5, 2),
                         doctest::Contains("empty-range"), Error);
  }
}

TEST_CASE("signed-variant verification validates the user signature") {
  World w("signedv");
  auto ukey = test_user_key();
  w.store.register_user(UserId("a@b.c"), params_for(10, 0.01), capacity_policy(),
                        DigestVariant::signed_, ukey.public_key());
  MemStream for_sign{std::string_view("contract.pdf bytes")};
  auto sig = user_sign(for_sign.stream(), ukey);
  MemStream body{std::string_view("contract.pdf bytes")};
  w.store.ingest(UserId("a@b.c"), body.stream(), 0, sig);
  w.tick(0);

  auto feed = w.feed();
  Verifier v(w.store, feed, w.csp.public_key());

  MemStream check_body{std::string_view("contract.pdf bytes")};
  auto result = v.check_membership(check_body.stream(), UserId("a@b.c"), 0, sig);
  CHECK(result.verdict == Verdict::positive);

  // Missing signature.
  MemStream no_sig{std::string_view("contract.pdf bytes")};
  CHECK_THROWS_WITH_AS(v.check_membership(no_sig.stream(), UserId("a@b.c"), 0),
                       doctest::Contains("signature-required"), Error);

  // A signature by someone else does not verify.
  MemStream other_sign{std::string_view("contract.pdf bytes")};
  auto foreign = user_sign(other_sign.stream(), test_csp_key());
  MemStream again{std::string_view("contract.pdf bytes")};
  CHECK_THROWS_WITH_AS(v.check_membership(again.stream(), UserId("a@b.c"), 0, foreign),
                       doctest::Contains("signature-invalid"), Error);
}

TEST_CASE("oracle equivalence on random histories") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 12; ++trial) {
    World w("oracle" + std::to_string(trial));
    bool periodic = rng() % 2 == 0;
    auto policy = periodic ? periodic_policy(1 + rng() % 3) : capacity_policy();
    w.add_user("u@x", 2 + rng() % 4, policy);

    std::vector<std::string> corpus;
    for (int i = 0; i < 6; ++i) corpus.push_back(random_content(rng, 32));

    DayIndex horizon = 4 + rng() % 5;
    for (DayIndex day = 0; day < horizon; ++day) {
      auto picks = rng() % 3;
      for (std::uint64_t i = 0; i < picks; ++i) {
        w.ingest("u@x", corpus[rng() % corpus.size()], day);
      }
      w.tick(day);
    }

    auto feed = w.feed();
    Verifier v(w.store, feed, w.csp.public_key());

    for (const auto& item : corpus) {
      MemStream s{std::string_view(item)};
      auto digest = v.digest_for(s.stream(), UserId("u@x"));

      // Brute-force linear scan over every published day.
      std::optional<DayIndex> expected;
      for (DayIndex day = 0; day < horizon; ++day) {
        if (v.check_digest(digest, UserId("u@x"), day).verdict == Verdict::positive) {
          expected = day;
          break;
        }
      }

      auto timeline = v.find_generation_time_digest(digest, UserId("u@x"));
      CHECK(timeline.earliest_day == expected);

      DayIndex lo = rng() % horizon;
      DayIndex hi = lo + rng() % (horizon - lo);
      std::optional<DayIndex> range_expected;
      for (DayIndex day = lo; day <= hi; ++day) {
        if (v.check_digest(digest, UserId("u@x"), day).verdict == Verdict::positive) {
          range_expected = day;
          break;
        }
      }
      auto range = v.present_in_range_digest(digest, UserId("u@x"), lo, hi);
      CHECK(range.present == range_expected.has_value());
      CHECK(range.witness_day == range_expected);
    }
  }
}
