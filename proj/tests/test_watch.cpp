#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ppdp/util.hpp"
#include "ppdp/watch.hpp"
#include "test_support.hpp"

using namespace ppdp;
namespace fs = std::filesystem;

namespace {

struct WatchWorld {
  TempDir dir;
  FilterStore store;
  fs::path drop_root;

  explicit WatchWorld(const std::string& tag)
      : dir(tag), store(dir.path() / "state"), drop_root(dir.path() / "drops") {
    fs::create_directories(drop_root);
  }

  void add_user(const std::string& user) {
    store.register_user(UserId(user), params_for(100, 0.01), capacity_policy());
    fs::create_directories(drop_root / url_encode(user));
  }

  void drop(const std::string& user, const std::string& name, std::string_view content) {
    write_file_atomic(drop_root / url_encode(user) / name, content);
  }

  WatchConfig config() const { return WatchConfig{drop_root, std::chrono::milliseconds(10)}; }
};

}  // namespace

TEST_CASE("empty directories yield no receipts") {
  WatchWorld w("empty");
  w.add_user("a@b.c");
  Watcher watcher(w.store, w.config());
  auto result = watcher.watch_once(0);
  CHECK(result.receipts.empty());
  CHECK(result.diagnostics.empty());
}

TEST_CASE("only unseen files are ingested") {
  WatchWorld w("unseen");
  w.add_user("a@b.c");
  w.drop("a@b.c", "one.txt", "first");
  Watcher watcher(w.store, w.config());
  auto first = watcher.watch_once(0);
  CHECK(first.receipts.size() == 1);

  w.drop("a@b.c", "two.txt", "second");
  w.drop("a@b.c", "three.txt", "third");
  auto second = watcher.watch_once(0);
  CHECK(second.receipts.size() == 2);

  auto third = watcher.watch_once(0);
  CHECK(third.receipts.empty());
}

TEST_CASE("a modified file is re-ingested with a new digest") {
  WatchWorld w("modified");
  w.add_user("a@b.c");
  w.drop("a@b.c", "doc.txt", "version 1");
  Watcher watcher(w.store, w.config());
  auto first = watcher.watch_once(0);
  REQUIRE(first.receipts.size() == 1);

  w.drop("a@b.c", "doc.txt", "version 2");
  auto second = watcher.watch_once(0);
  REQUIRE(second.receipts.size() == 1);
  CHECK(second.receipts[0].receipt.digest != first.receipts[0].receipt.digest);

  // Reverting to known content is not ingested again.
  w.drop("a@b.c", "doc.txt", "version 1");
  CHECK(watcher.watch_once(0).receipts.empty());
}

TEST_CASE("restart does not double-ingest (persistent seen-set)") {
  WatchWorld w("restart");
  w.add_user("a@b.c");
  w.drop("a@b.c", "doc.txt", "payload");
  {
    Watcher watcher(w.store, w.config());
    CHECK(watcher.watch_once(0).receipts.size() == 1);
  }
  {
    Watcher watcher(w.store, w.config());
    CHECK(watcher.watch_once(0).receipts.empty());
    w.drop("a@b.c", "new.txt", "fresh");
    CHECK(watcher.watch_once(0).receipts.size() == 1);
  }
}

TEST_CASE("watcher serves multiple users and never writes into drop dirs") {
  WatchWorld w("multi");
  w.add_user("a@b.c");
  w.add_user("z@b.c");
  w.drop("a@b.c", "fa", "A");
  w.drop("z@b.c", "fz", "Z");
  Watcher watcher(w.store, w.config());
  auto result = watcher.watch_once(3);
  CHECK(result.receipts.size() == 2);

  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(w.drop_root)) {
    if (entry.is_regular_file()) ++files;
  }
  CHECK(files == 2);  // nothing new appeared under the drop root
}

TEST_CASE("unreadable entries are skipped with a diagnostic") {
  WatchWorld w("unreadable");
  w.add_user("a@b.c");
  w.drop("a@b.c", "good.txt", "fine");
  // A dangling symlink shows up in the listing but cannot be opened.
  fs::create_symlink(w.drop_root / "missing-target",
                     w.drop_root / url_encode("a@b.c") / "broken.txt");
  Watcher watcher(w.store, w.config());
  auto result = watcher.watch_once(0);
  CHECK(result.receipts.size() == 1);
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].find("broken.txt") != std::string::npos);
}

TEST_CASE("missing drop directory is a diagnostic, not an error") {
  WatchWorld w("nodir");
  w.store.register_user(UserId("nodrop@b.c"), params_for(10, 0.01), capacity_policy());
  Watcher watcher(w.store, w.config());
  auto result = watcher.watch_once(0);
  CHECK(result.receipts.empty());
  REQUIRE(result.diagnostics.size() == 1);
}

TEST_CASE("signed-variant users require a .sig companion") {
  WatchWorld w("sig");
  auto ukey = test_user_key();
  w.store.register_user(UserId("s@b.c"), params_for(10, 0.01), capacity_policy(),
                        DigestVariant::signed_, ukey.public_key());
  fs::create_directories(w.drop_root / url_encode("s@b.c"));
  w.drop("s@b.c", "doc", "signed payload");

  Watcher watcher(w.store, w.config());
  auto no_sig = watcher.watch_once(0);
  CHECK(no_sig.receipts.empty());
  REQUIRE(no_sig.diagnostics.size() == 1);

  MemStream body{std::string_view("signed payload")};
  auto sig = user_sign(body.stream(), ukey);
  w.drop("s@b.c", "doc.sig", to_hex(sig.bytes));
  auto with_sig = watcher.watch_once(0);
  REQUIRE(with_sig.receipts.size() == 1);
  CHECK(with_sig.receipts[0].receipt.digest.variant == DigestVariant::signed_);

  // The .sig companion itself is never treated as evidence.
  CHECK(watcher.watch_once(0).receipts.empty());
}

TEST_CASE("watch_loop stops on request") {
  WatchWorld w("loop");
  w.add_user("a@b.c");
  w.drop("a@b.c", "f", "x");
  Watcher watcher(w.store, w.config());
  std::atomic<bool> stop{false};
  std::size_t rounds = 0;
  std::size_t ingested = 0;
  watcher.watch_loop(
      stop, [] { return DayIndex{0}; },
      [&](const WatchResult& r) {
        ingested += r.receipts.size();
        if (++rounds >= 3) stop = true;
      });
  CHECK(rounds >= 3);
  CHECK(ingested == 1);
}
