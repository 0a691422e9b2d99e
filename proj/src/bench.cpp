#include "ppdp/bench.hpp"

#include <sys/utsname.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "ppdp/errors.hpp"
#include "ppdp/feed.hpp"
#include "ppdp/store.hpp"
#include "ppdp/util.hpp"
#include "ppdp/verifier.hpp"

namespace ppdp {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path scratch_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  auto dir = fs::temp_directory_path() / ("ppdp_bench_" + tag + "_" + std::to_string(::getpid()) +
                                          "_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) : path(scratch_dir(tag)) {}
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_whole_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io_error, "cannot open " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) raise(Errc::io_error, "write failed for " + path.string());
}

SigningKeyPair bench_key(std::uint64_t seed, std::uint64_t salt) {
  std::array<std::uint8_t, 32> bytes{};
  std::mt19937_64 rng(seed ^ salt);
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
  return SigningKeyPair::from_seed(bytes);
}

// A filter large enough that the corpus never triggers rotation; the
// evaluation inserted without any capacity check.
void register_bench_user(FilterStore& store, const BenchConfig& config, const UserId& user,
                         const std::optional<PublicKey>& user_pub) {
  auto params = params_for(std::max<std::uint64_t>(config.file_count, 1), 0.01);
  auto variant = config.variant;
  store.register_user(user, params, periodic_policy(1u << 20), variant, user_pub);
}

}  // namespace

std::vector<std::uint64_t> sample_sizes(const BenchConfig& config) {
  if (config.min_size > config.max_size) {
    raise(Errc::invalid_parameter, "min_size exceeds max_size");
  }
  std::vector<std::uint64_t> sizes(config.file_count);
  if (config.min_size == config.max_size) {
    std::fill(sizes.begin(), sizes.end(), config.min_size);
    return sizes;
  }
  std::mt19937_64 rng(config.seed);
  double lo = std::log(static_cast<double>(config.min_size));
  double hi = std::log(static_cast<double>(config.max_size));
  std::lognormal_distribution<double> dist((lo + hi) / 2.0, (hi - lo) / 6.0);
  for (auto& size : sizes) {
    double s = dist(rng);
    s = std::clamp(s, static_cast<double>(config.min_size),
                   static_cast<double>(config.max_size));
    size = static_cast<std::uint64_t>(s);
  }
  return sizes;
}

std::string bench_content(std::uint64_t seed, std::size_t index, std::uint64_t size) {
  std::string content(size, '\0');
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + index + 1);
  std::size_t offset = 0;
  while (offset + 8 <= content.size()) {
    std::uint64_t word = rng();
    std::memcpy(content.data() + offset, &word, 8);
    offset += 8;
  }
  for (; offset < content.size(); ++offset) {
    content[offset] = static_cast<char>(rng());
  }
  return content;
}

IngestReport bench_ingest(const BenchConfig& config) {
  ScratchDir scratch("ingest");
  auto sizes = sample_sizes(config);

  UserId user("bench@ppdp.local");
  std::optional<SigningKeyPair> user_key;
  std::optional<PublicKey> user_pub;
  if (config.variant == DigestVariant::signed_) {
    user_key = bench_key(config.seed, 0x55AA);
    user_pub = user_key->public_key();
  }

  auto baseline_dir = scratch.path / "baseline";
  auto storage_dir = scratch.path / "storage";
  fs::create_directories(baseline_dir);
  fs::create_directories(storage_dir);

  // Per-file means over repetitions, then aggregated into size buckets.
  std::vector<double> baseline_time(sizes.size(), 0.0);
  std::vector<double> proof_time(sizes.size(), 0.0);

  for (std::size_t rep = 0; rep < std::max<std::size_t>(config.repetitions, 1); ++rep) {
    FilterStore store(scratch.path / ("state_" + std::to_string(rep)));
    register_bench_user(store, config, user, user_pub);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      auto content = bench_content(config.seed, i, sizes[i]);
      auto name = std::to_string(i) + ".bin";

      auto t0 = Clock::now();
      write_whole_file(baseline_dir / name, content);
      baseline_time[i] += elapsed_seconds(t0);

      auto t1 = Clock::now();
      write_whole_file(storage_dir / name, content);
      std::optional<Signature> sig;
      if (user_key) {
        MemStream for_sign{std::string_view(content)};
        sig = user_sign(for_sign.stream(), *user_key);
      }
      MemStream body{std::string_view(content)};
      store.ingest(user, body.stream(), 0, sig);
      proof_time[i] += elapsed_seconds(t1);

      fs::remove(baseline_dir / name);
      fs::remove(storage_dir / name);
    }
  }
  auto reps = static_cast<double>(std::max<std::size_t>(config.repetitions, 1));
  for (auto& t : baseline_time) t /= reps;
  for (auto& t : proof_time) t /= reps;

  IngestReport report;
  report.seed = config.seed;
  report.variant = std::string(variant_name(config.variant));
  report.machine = machine_descriptor();

  auto min_size = *std::min_element(sizes.begin(), sizes.end());
  auto max_size = *std::max_element(sizes.begin(), sizes.end());
  auto buckets = std::max<std::size_t>(config.bucket_count, 1);
  double lo = std::log(static_cast<double>(std::max<std::uint64_t>(min_size, 1)));
  double hi = std::log(static_cast<double>(std::max<std::uint64_t>(max_size, 1)));
  auto bucket_of = [&](std::uint64_t size) -> std::size_t {
    if (hi <= lo) return 0;
    double pos = (std::log(static_cast<double>(std::max<std::uint64_t>(size, 1))) - lo) /
                 (hi - lo) * static_cast<double>(buckets);
    auto b = static_cast<std::size_t>(pos);
    return std::min(b, buckets - 1);
  };

  report.buckets.assign(buckets, IngestBucket{});
  for (std::size_t b = 0; b < buckets; ++b) {
    report.buckets[b].size_lo =
        static_cast<std::uint64_t>(std::exp(lo + (hi - lo) * static_cast<double>(b) /
                                            static_cast<double>(buckets)));
    report.buckets[b].size_hi =
        static_cast<std::uint64_t>(std::exp(lo + (hi - lo) * static_cast<double>(b + 1) /
                                            static_cast<double>(buckets)));
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    auto& bucket = report.buckets[bucket_of(sizes[i])];
    ++bucket.files;
    bucket.mean_size_bytes += static_cast<double>(sizes[i]);
    bucket.baseline_seconds += baseline_time[i];
    bucket.with_proof_seconds += proof_time[i];
  }
  std::erase_if(report.buckets, [](const IngestBucket& b) { return b.files == 0; });
  for (auto& bucket : report.buckets) {
    auto n = static_cast<double>(bucket.files);
    bucket.mean_size_bytes /= n;
    bucket.baseline_seconds /= n;
    bucket.with_proof_seconds /= n;
    bucket.overhead_pct = bucket.baseline_seconds > 0.0
                              ? 100.0 * (bucket.with_proof_seconds - bucket.baseline_seconds) /
                                    bucket.baseline_seconds
                              : 0.0;
  }
  return report;
}

MatchReport bench_match(const BenchConfig& config, MatchMode mode) {
  ScratchDir scratch("match");
  auto sizes = sample_sizes(config);

  UserId user("bench@ppdp.local");
  std::optional<SigningKeyPair> user_key;
  std::optional<PublicKey> user_pub;
  if (config.variant == DigestVariant::signed_) {
    user_key = bench_key(config.seed, 0x55AA);
    user_pub = user_key->public_key();
  }
  auto csp = bench_key(config.seed, 0xC59);

  FilterStore store(scratch.path / "state");
  register_bench_user(store, config, user, user_pub);
  auto feed_path = scratch.path / "state" / "feed.jsonl";

  // Day 0 publishes an empty filter (the true-negative proof); day 1
  // publishes the filter holding the whole corpus.
  store.snapshot_all(0);
  publish_day(store, feed_path, 0, csp);
  std::vector<std::optional<Signature>> sigs(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    auto content = bench_content(config.seed, i, sizes[i]);
    if (user_key) {
      MemStream for_sign{std::string_view(content)};
      sigs[i] = user_sign(for_sign.stream(), *user_key);
    }
    MemStream body{std::string_view(content)};
    store.ingest(user, body.stream(), 1, sigs[i]);
  }
  store.snapshot_all(1);
  publish_day(store, feed_path, 1, csp);

  auto feed = ProofFeed::load(feed_path);
  Verifier verifier(store, feed, csp.public_key());
  DayIndex check_day = mode == MatchMode::true_positive ? 1 : 0;

  MatchReport report;
  report.seed = config.seed;
  report.variant = std::string(variant_name(config.variant));
  report.mode = mode == MatchMode::true_positive ? "true_positive" : "true_negative";
  report.machine = machine_descriptor();
  report.samples.resize(sizes.size());

  auto reps = std::max<std::size_t>(config.repetitions, 1);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    auto content = bench_content(config.seed, i, sizes[i]);
    report.samples[i].size_bytes = sizes[i];
    bool positive = false;
    double total = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      auto t0 = Clock::now();
      MemStream body{std::string_view(content)};
      auto result = verifier.check_membership(body.stream(), user, check_day, sigs[i]);
      total += elapsed_seconds(t0);
      positive = result.verdict == Verdict::positive;
    }
    report.samples[i].seconds = total / static_cast<double>(reps);
    report.samples[i].positive = positive;
  }

  std::sort(report.samples.begin(), report.samples.end(),
            [](const MatchSample& a, const MatchSample& b) { return a.size_bytes < b.size_bytes; });
  std::vector<double> xs, ys;
  xs.reserve(report.samples.size());
  ys.reserve(report.samples.size());
  for (const auto& s : report.samples) {
    xs.push_back(static_cast<double>(s.size_bytes));
    ys.push_back(s.seconds);
  }
  report.spearman_size_time = spearman_rho(xs, ys);
  return report;
}

StorageReport storage_report(std::uint64_t users, const BloomParams& params,
                             double assumed_deleted_bytes) {
  StorageReport report;
  report.users = users;
  report.m_bits = params.m_bits;
  report.filter_bytes_per_user_day = static_cast<double>(params.m_bits) / 8.0;
  report.snapshot_file_bytes = 36 + (params.m_bits + 7) / 8;
  report.total_filter_bytes_per_day =
      static_cast<double>(users) * report.filter_bytes_per_user_day;
  report.assumed_deleted_bytes = assumed_deleted_bytes;
  report.savings_bytes_per_user_day = assumed_deleted_bytes - report.filter_bytes_per_user_day;
  return report;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    raise(Errc::invalid_parameter, "spearman needs two equal-length series");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mean_rank;
      i = j + 1;
    }
    return rank;
  };
  auto rx = ranks(x);
  auto ry = ranks(y);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx == 0.0 || vy == 0.0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

std::string machine_descriptor() {
  std::string cpu = "unknown-cpu";
  std::ifstream info("/proc/cpuinfo");
  std::string line;
  while (std::getline(info, line)) {
    if (line.rfind("model name", 0) == 0) {
      auto pos = line.find(':');
      if (pos != std::string::npos) {
        cpu = line.substr(pos + 1);
        while (!cpu.empty() && cpu.front() == ' ') cpu.erase(cpu.begin());
      }
      break;
    }
  }
  struct utsname uts{};
  if (uname(&uts) == 0) {
    return cpu + " / " + uts.sysname + " " + uts.release;
  }
  return cpu;
}

}  // namespace ppdp
