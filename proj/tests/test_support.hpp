#pragma once

// Shared helpers for the test binaries. Keys and fixtures under golden/ are
// test-only material; never reuse them outside the suite.

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>

#include "ppdp/crypto.hpp"
#include "ppdp/evidence.hpp"
#include "ppdp/util.hpp"

namespace ppdp {

inline std::filesystem::path test_data_dir() {
  if (const char* env = std::getenv("PPDP_TEST_DATA")) return env;
#ifdef PPDP_TEST_DATA_DIR
  return PPDP_TEST_DATA_DIR;
#else
  return "tests/golden";
#endif
}

inline EvidenceDigest digest_from_hex(std::string_view hex,
                                      DigestVariant variant = DigestVariant::plain) {
  auto bytes = from_hex(hex);
  EvidenceDigest d;
  d.variant = variant;
  std::memcpy(d.bytes.data(), bytes.data(), d.bytes.size());
  return d;
}

inline EvidenceDigest random_digest(std::mt19937_64& rng,
                                    DigestVariant variant = DigestVariant::plain) {
  EvidenceDigest d;
  d.variant = variant;
  for (auto& b : d.bytes) b = static_cast<std::uint8_t>(rng());
  return d;
}

inline std::string random_content(std::mt19937_64& rng, std::size_t size) {
  std::string s(size, '\0');
  for (auto& c : s) c = static_cast<char>('a' + rng() % 26);
  return s;
}

inline SigningKeyPair test_csp_key() {
  return load_keypair(test_data_dir() / "keys" / "test_only_csp.key");
}

inline SigningKeyPair test_user_key() {
  return load_keypair(test_data_dir() / "keys" / "test_only_user.key");
}

// A unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ppdp_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ppdp
