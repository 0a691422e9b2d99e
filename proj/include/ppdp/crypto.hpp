#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>

#include "ppdp/evidence.hpp"

namespace ppdp {

inline constexpr std::string_view kHashAlg = "sha256";
inline constexpr std::string_view kSigAlg = "ed25519";

using PublicKey = std::array<std::uint8_t, 32>;

struct Signature {
  std::array<std::uint8_t, 64> bytes{};

  friend bool operator==(const Signature&, const Signature&) = default;
};

// Ed25519 key pair. The secret half is wiped on destruction and must never
// appear in the feed, snapshots, or logs.
class SigningKeyPair {
 public:
  SigningKeyPair(const SigningKeyPair&) = default;
  SigningKeyPair& operator=(const SigningKeyPair&) = default;
  ~SigningKeyPair();

  static SigningKeyPair generate();
  static SigningKeyPair from_seed(std::span<const std::uint8_t> seed32);
  static SigningKeyPair from_secret_bytes(std::span<const std::uint8_t> secret64);

  const PublicKey& public_key() const noexcept { return public_; }
  std::span<const std::uint8_t, 64> secret_bytes() const noexcept { return secret_; }

 private:
  SigningKeyPair() = default;
  std::array<std::uint8_t, 64> secret_{};
  PublicKey public_{};
};

// Streaming SHA-256; evidence is read in fixed 1 MiB chunks so arbitrarily
// large files need constant memory.
std::array<std::uint8_t, 32> sha256_stream(std::istream& in);
std::array<std::uint8_t, 32> sha256_bytes(std::span<const std::uint8_t> bytes);

// H(len(user) as 8-byte big-endian || user || file bytes), variant = plain.
EvidenceDigest digest_plain(std::istream& file, const UserId& user);

// H(len(user) prefix || user || signature bytes), variant = signed.
EvidenceDigest digest_signed(const Signature& sig, const UserId& user);

// Deterministic Ed25519 signature over SHA-256(file bytes).
Signature user_sign(std::istream& file, const SigningKeyPair& key);
bool verify_user_signature(const std::array<std::uint8_t, 32>& file_hash, const Signature& sig,
                           const PublicKey& pub);

Signature sign_commitment(std::span<const std::uint8_t> data, const SigningKeyPair& key);
bool verify_commitment(std::span<const std::uint8_t> data, const Signature& sig,
                       const PublicKey& pub);

enum class KeyRole { csp, user };

// Writes <prefix>.key (hex secret, mode 0600) and <prefix>.pub (hex public).
// Refuses to overwrite existing files unless `overwrite` is set.
SigningKeyPair keygen(KeyRole role, const std::filesystem::path& prefix, bool overwrite = false);

SigningKeyPair load_keypair(const std::filesystem::path& secret_path);
PublicKey load_public_key(const std::filesystem::path& pub_path);
PublicKey public_key_from_hex(std::string_view hex);

}  // namespace ppdp
