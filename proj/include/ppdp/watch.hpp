#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ppdp/store.hpp"

namespace ppdp {

struct WatchConfig {
  std::filesystem::path root;  // one subdirectory per registered user
  std::chrono::milliseconds interval{1000};
};

struct WatchReceipt {
  std::string user;
  std::filesystem::path path;
  IngestReceipt receipt;
};

struct WatchResult {
  std::vector<WatchReceipt> receipts;
  std::vector<std::string> diagnostics;  // skipped files, missing dirs
};

// Polls per-user drop directories and ingests anything not yet recorded in
// the persistent seen-set, keyed by (path, content hash) so in-place edits
// re-ingest as updated files while restarts never double-ingest. The watcher
// only reads user directories; its own state lives under the store root.
class Watcher {
 public:
  Watcher(FilterStore& store, WatchConfig config);

  WatchResult watch_once(DayIndex current_day);

  // Runs watch_once every config.interval until *stop is set. The day is
  // re-read each round so a long-running watcher follows the logical clock.
  void watch_loop(const std::atomic<bool>& stop, const std::function<DayIndex()>& current_day,
                  const std::function<void(const WatchResult&)>& on_result = {});

 private:
  bool already_seen(const std::string& key, const std::string& content_hash) const;
  void mark_seen(const std::string& key, std::uint64_t size, const std::string& content_hash);

  FilterStore& store_;
  WatchConfig config_;
  std::filesystem::path seen_path_;
  std::map<std::string, std::set<std::string>> seen_;
};

}  // namespace ppdp
