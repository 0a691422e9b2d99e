#include "ppdp/watch.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ppdp/crypto.hpp"
#include "ppdp/errors.hpp"
#include "ppdp/util.hpp"

namespace ppdp {

namespace fs = std::filesystem;
using nlohmann::json;

Watcher::Watcher(FilterStore& store, WatchConfig config)
    : store_(store), config_(std::move(config)), seen_path_(store.root() / "seen.jsonl") {
  if (!fs::exists(seen_path_)) return;
  std::ifstream in(seen_path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) raise(Errc::io_error, "corrupt seen-set record in " + seen_path_.string());
    seen_[j.at("path").get<std::string>()].insert(j.at("sha256").get<std::string>());
  }
}

bool Watcher::already_seen(const std::string& key, const std::string& content_hash) const {
  auto it = seen_.find(key);
  return it != seen_.end() && it->second.count(content_hash) > 0;
}

void Watcher::mark_seen(const std::string& key, std::uint64_t size,
                        const std::string& content_hash) {
  json j = {{"path", key}, {"sha256", content_hash}, {"size", size}};
  append_line(seen_path_, j.dump());
  seen_[key].insert(content_hash);
}

WatchResult Watcher::watch_once(DayIndex current_day) {
  WatchResult result;
  for (const auto& user : store_.users()) {
    auto dir = config_.root / url_encode(user.value());
    if (!fs::is_directory(dir)) {
      result.diagnostics.push_back("no drop directory for " + user.value() + " at " +
                                   dir.string());
      continue;
    }
    auto config = store_.user_config(user);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      std::error_code ec;
      if (entry.is_directory(ec)) continue;
      if (entry.path().extension() == ".sig") continue;
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& path : files) {
      std::string key = url_encode(user.value()) + "/" + path.filename().string();

      std::ifstream probe(path, std::ios::binary);
      if (!probe) {
        result.diagnostics.push_back("unreadable, skipped: " + path.string());
        continue;
      }
      std::string content_hash;
      std::uint64_t size = 0;
      try {
        content_hash = to_hex(sha256_stream(probe));
        std::error_code ec;
        size = static_cast<std::uint64_t>(fs::file_size(path, ec));
        if (ec) size = 0;
      } catch (const Error& e) {
        result.diagnostics.push_back("unreadable, skipped: " + path.string() + " (" + e.what() +
                                     ")");
        continue;
      }
      if (already_seen(key, content_hash)) continue;

      std::optional<Signature> sig;
      if (config.variant == DigestVariant::signed_) {
        auto sig_path = path;
        sig_path += ".sig";
        if (!fs::exists(sig_path)) {
          result.diagnostics.push_back("signed-variant user, no companion .sig, skipped: " +
                                       path.string());
          continue;
        }
        auto hex = read_file_text(sig_path);
        while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r' || hex.back() == ' ')) {
          hex.pop_back();
        }
        try {
          auto bytes = from_hex(hex);
          if (bytes.size() != 64) raise(Errc::malformed_key, "signature must be 64 bytes");
          Signature s;
          std::copy(bytes.begin(), bytes.end(), s.bytes.begin());
          sig = s;
        } catch (const Error& e) {
          result.diagnostics.push_back("bad .sig companion, skipped: " + path.string() + " (" +
                                       e.what() + ")");
          continue;
        }
      }

      std::ifstream body(path, std::ios::binary);
      if (!body) {
        result.diagnostics.push_back("unreadable, skipped: " + path.string());
        continue;
      }
      try {
        auto receipt = store_.ingest(user, body, current_day, sig);
        mark_seen(key, size, content_hash);
        result.receipts.push_back(WatchReceipt{user.value(), path, receipt});
      } catch (const Error& e) {
        result.diagnostics.push_back("ingest failed, skipped: " + path.string() + " (" +
                                     e.what() + ")");
      }
    }
  }
  return result;
}

void Watcher::watch_loop(const std::atomic<bool>& stop,
                         const std::function<DayIndex()>& current_day,
                         const std::function<void(const WatchResult&)>& on_result) {
  while (!stop.load()) {
    auto result = watch_once(current_day());
    if (on_result) on_result(result);
    auto slept = std::chrono::milliseconds(0);
    // Sleep in short slices so a stop signal is honored promptly.
    while (!stop.load() && slept < config_.interval) {
      auto slice = std::min(config_.interval - slept, std::chrono::milliseconds(50));
      std::this_thread::sleep_for(slice);
      slept += slice;
    }
  }
}

}  // namespace ppdp
