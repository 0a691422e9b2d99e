#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "ppdp/bench.hpp"
#include "ppdp/errors.hpp"

using namespace ppdp;

namespace {
BenchConfig small_config() {
  BenchConfig config;
  config.file_count = 24;
  config.seed = 11;
  config.repetitions = 1;
  config.min_size = 2 * 1024;
  config.max_size = 64 * 1024;
  config.bucket_count = 4;
  return config;
}
}  // namespace

TEST_CASE("sample_sizes stays within bounds and is deterministic") {
  BenchConfig config;
  config.file_count = 500;
  auto sizes = sample_sizes(config);
  REQUIRE(sizes.size() == 500);
  for (auto s : sizes) {
    CHECK(s >= config.min_size);
    CHECK(s <= config.max_size);
  }
  CHECK(sizes == sample_sizes(config));

  auto lo = *std::min_element(sizes.begin(), sizes.end());
  auto hi = *std::max_element(sizes.begin(), sizes.end());
  // The lognormal spread actually exercises the range.
  CHECK(hi > 4 * lo);
}

TEST_CASE("bench_content is deterministic per index") {
  CHECK(bench_content(1, 0, 1000) == bench_content(1, 0, 1000));
  CHECK(bench_content(1, 0, 1000) != bench_content(1, 1, 1000));
  CHECK(bench_content(2, 0, 1000) != bench_content(1, 0, 1000));
  CHECK(bench_content(1, 0, 0).empty());
}

TEST_CASE("bench_ingest produces a coherent table") {
  auto report = bench_ingest(small_config());
  CHECK(report.variant == "plain");
  CHECK(!report.machine.empty());
  REQUIRE(!report.buckets.empty());
  std::size_t files = 0;
  for (const auto& b : report.buckets) {
    files += b.files;
    CHECK(b.baseline_seconds > 0.0);
    CHECK(b.with_proof_seconds > 0.0);
    // Proof insertion can only add work on top of the baseline write.
    CHECK(b.with_proof_seconds >= b.baseline_seconds * 0.5);
  }
  CHECK(files == 24);
}

TEST_CASE("bench_ingest completes on a zero-byte corpus") {
  auto config = small_config();
  config.min_size = 0;
  config.max_size = 0;
  config.file_count = 5;
  auto report = bench_ingest(config);
  std::size_t files = 0;
  for (const auto& b : report.buckets) files += b.files;
  CHECK(files == 5);
}

TEST_CASE("bench_match true positives all verify") {
  auto report = bench_match(small_config(), MatchMode::true_positive);
  CHECK(report.mode == "true_positive");
  REQUIRE(report.samples.size() == 24);
  for (const auto& s : report.samples) {
    CHECK(s.positive);
    CHECK(s.seconds > 0.0);
  }
  CHECK(std::is_sorted(report.samples.begin(), report.samples.end(),
                       [](const MatchSample& a, const MatchSample& b) {
                         return a.size_bytes < b.size_bytes;
                       }));
}

TEST_CASE("bench_match true negatives all refute") {
  auto report = bench_match(small_config(), MatchMode::true_negative);
  for (const auto& s : report.samples) CHECK_FALSE(s.positive);
}

TEST_CASE("bench_match in signed variant works end to end") {
  auto config = small_config();
  config.file_count = 6;
  config.variant = DigestVariant::signed_;
  auto report = bench_match(config, MatchMode::true_positive);
  for (const auto& s : report.samples) CHECK(s.positive);
}

TEST_CASE("storage_report reproduces the reference arithmetic") {
  auto params = params_for(1000, 0.01);
  auto report = storage_report(1, params);
  CHECK(report.filter_bytes_per_user_day == 1262.375);
  CHECK(report.total_filter_bytes_per_day == 1262.375);
  CHECK(report.snapshot_file_bytes == 36 + 1263);

  auto many = storage_report(5000, params);
  CHECK(many.total_filter_bytes_per_day == 5000 * 1262.375);

  // Savings for the 5 MB/day deletion illustration, exact.
  CHECK(report.assumed_deleted_bytes == 5'000'000.0);
  CHECK(report.savings_bytes_per_user_day == 5'000'000.0 - 1262.375);
  CHECK(report.savings_bytes_per_user_day == 4'998'737.625);
}

TEST_CASE("spearman_rho behaves on known series") {
  CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_rho({1, 2, 3, 4}, {40, 30, 20, 10}) == doctest::Approx(-1.0));
  CHECK(spearman_rho({1, 2, 3, 4}, {10, 20, 20, 40}) > 0.9);
  CHECK(spearman_rho({1, 1, 1, 1}, {1, 2, 3, 4}) == 0.0);
  CHECK_THROWS_AS(spearman_rho({1}, {1}), Error);
  CHECK_THROWS_AS(spearman_rho({1, 2}, {1}), Error);
}
