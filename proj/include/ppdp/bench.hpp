#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppdp/bloom.hpp"
#include "ppdp/evidence.hpp"

namespace ppdp {

// Desk-scale reproduction of the evaluation: lognormal file sizes bounded to
// the reported [693 KB, 13843 KB] corpus. Absolute timings are machine-bound;
// the reproducible claims are the trends and the storage arithmetic, and the
// baseline here is a local file copy rather than a network upload, so the
// overhead percentages are not comparable to the original absolute figures.
struct BenchConfig {
  std::size_t file_count{1000};
  std::uint64_t seed{42};
  DigestVariant variant{DigestVariant::plain};
  std::size_t repetitions{3};
  std::uint64_t min_size{693ull * 1024};
  std::uint64_t max_size{13843ull * 1024};
  std::size_t bucket_count{8};
};

// Deterministic lognormal sizes within [min_size, max_size].
std::vector<std::uint64_t> sample_sizes(const BenchConfig& config);

// Deterministic per-file content; index selects the stream.
std::string bench_content(std::uint64_t seed, std::size_t index, std::uint64_t size);

struct IngestBucket {
  std::uint64_t size_lo{0};
  std::uint64_t size_hi{0};
  std::size_t files{0};
  double mean_size_bytes{0};
  double baseline_seconds{0};    // mean per file: plain write ("upload")
  double with_proof_seconds{0};  // mean per file: write plus proof insertion
  double overhead_pct{0};
};

struct IngestReport {
  std::uint64_t seed{0};
  std::string variant;
  std::string machine;
  std::vector<IngestBucket> buckets;
};

IngestReport bench_ingest(const BenchConfig& config);

enum class MatchMode { true_positive, true_negative };

struct MatchSample {
  std::uint64_t size_bytes{0};
  double seconds{0};
  bool positive{false};
};

struct MatchReport {
  std::uint64_t seed{0};
  std::string variant;
  std::string mode;
  std::string machine;
  std::vector<MatchSample> samples;  // ordered by size
  double spearman_size_time{0};
};

MatchReport bench_match(const BenchConfig& config, MatchMode mode);

struct StorageReport {
  std::uint64_t users{0};
  std::uint64_t m_bits{0};
  double filter_bytes_per_user_day{0};    // m_bits / 8, exact
  std::uint64_t snapshot_file_bytes{0};   // header + padded bit array
  double total_filter_bytes_per_day{0};   // users * filter payload
  double assumed_deleted_bytes{0};
  double savings_bytes_per_user_day{0};   // deleted - filter payload
};

// Storage arithmetic, exact: the daily published payload per user is m/8
// bytes; keeping proofs instead of (say) 5 MB of deleted files per user per
// day saves the difference.
StorageReport storage_report(std::uint64_t users, const BloomParams& params,
                             double assumed_deleted_bytes = 5'000'000.0);

// Spearman rank correlation with mean ranks for ties.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

std::string machine_descriptor();

}  // namespace ppdp
