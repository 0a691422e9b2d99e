#include "ppdp/crypto.hpp"

#include <sodium.h>
#include <sys/stat.h>

#include <cstring>
#include <fstream>
#include <vector>

#include "ppdp/errors.hpp"
#include "ppdp/util.hpp"

namespace ppdp {

namespace {

constexpr std::size_t kChunkSize = 1 << 20;

void ensure_sodium() {
  if (sodium_init() < 0) raise(Errc::io_error, "libsodium initialization failed");
}

class Sha256 {
 public:
  Sha256() {
    ensure_sodium();
    crypto_hash_sha256_init(&state_);
  }
  void update(const void* data, std::size_t len) {
    crypto_hash_sha256_update(&state_, static_cast<const unsigned char*>(data), len);
  }
  std::array<std::uint8_t, 32> finish() {
    std::array<std::uint8_t, 32> out{};
    crypto_hash_sha256_final(&state_, out.data());
    return out;
  }

 private:
  crypto_hash_sha256_state state_{};
};

void update_user_prefix(Sha256& h, const UserId& user) {
  std::vector<std::uint8_t> prefix;
  put_be64(prefix, user.value().size());
  h.update(prefix.data(), prefix.size());
  h.update(user.value().data(), user.value().size());
}

void stream_into(Sha256& h, std::istream& in) {
  std::vector<char> chunk(kChunkSize);
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    auto got = in.gcount();
    if (got > 0) h.update(chunk.data(), static_cast<std::size_t>(got));
  }
  if (in.bad()) raise(Errc::io_error, "evidence stream read failed");
}

void write_restricted(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, text);
  ::chmod(path.c_str(), 0600);
}

}  // namespace

SigningKeyPair::~SigningKeyPair() { sodium_memzero(secret_.data(), secret_.size()); }

SigningKeyPair SigningKeyPair::generate() {
  ensure_sodium();
  SigningKeyPair kp;
  crypto_sign_keypair(kp.public_.data(), kp.secret_.data());
  return kp;
}

SigningKeyPair SigningKeyPair::from_seed(std::span<const std::uint8_t> seed32) {
  ensure_sodium();
  if (seed32.size() != crypto_sign_SEEDBYTES) raise(Errc::malformed_key, "seed must be 32 bytes");
  SigningKeyPair kp;
  crypto_sign_seed_keypair(kp.public_.data(), kp.secret_.data(), seed32.data());
  return kp;
}

SigningKeyPair SigningKeyPair::from_secret_bytes(std::span<const std::uint8_t> secret64) {
  ensure_sodium();
  if (secret64.size() != crypto_sign_SECRETKEYBYTES) {
    raise(Errc::malformed_key, "secret key must be 64 bytes");
  }
  SigningKeyPair kp;
  std::memcpy(kp.secret_.data(), secret64.data(), secret64.size());
  crypto_sign_ed25519_sk_to_pk(kp.public_.data(), kp.secret_.data());
  return kp;
}

std::array<std::uint8_t, 32> sha256_stream(std::istream& in) {
  Sha256 h;
  stream_into(h, in);
  return h.finish();
}

std::array<std::uint8_t, 32> sha256_bytes(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.finish();
}

EvidenceDigest digest_plain(std::istream& file, const UserId& user) {
  Sha256 h;
  update_user_prefix(h, user);
  stream_into(h, file);
  return EvidenceDigest{h.finish(), DigestVariant::plain};
}

EvidenceDigest digest_signed(const Signature& sig, const UserId& user) {
  Sha256 h;
  update_user_prefix(h, user);
  h.update(sig.bytes.data(), sig.bytes.size());
  return EvidenceDigest{h.finish(), DigestVariant::signed_};
}

Signature user_sign(std::istream& file, const SigningKeyPair& key) {
  auto file_hash = sha256_stream(file);
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, file_hash.data(), file_hash.size(),
                       key.secret_bytes().data());
  return sig;
}

bool verify_user_signature(const std::array<std::uint8_t, 32>& file_hash, const Signature& sig,
                           const PublicKey& pub) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), file_hash.data(), file_hash.size(),
                                     pub.data()) == 0;
}

Signature sign_commitment(std::span<const std::uint8_t> data, const SigningKeyPair& key) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, data.data(), data.size(),
                       key.secret_bytes().data());
  return sig;
}

bool verify_commitment(std::span<const std::uint8_t> data, const Signature& sig,
                       const PublicKey& pub) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), data.data(), data.size(), pub.data()) == 0;
}

SigningKeyPair keygen(KeyRole role, const std::filesystem::path& prefix, bool overwrite) {
  (void)role;  // both roles use the same scheme; the caller picks the path
  auto secret_path = prefix;
  secret_path += ".key";
  auto pub_path = prefix;
  pub_path += ".pub";
  if (!overwrite) {
    if (std::filesystem::exists(secret_path)) {
      raise(Errc::key_exists, secret_path.string() + " already exists");
    }
    if (std::filesystem::exists(pub_path)) {
      raise(Errc::key_exists, pub_path.string() + " already exists");
    }
  }
  auto kp = SigningKeyPair::generate();
  write_restricted(secret_path, to_hex(kp.secret_bytes()) + "\n");
  write_file_atomic(pub_path, to_hex(kp.public_key()) + "\n");
  return kp;
}

namespace {
std::string read_hex_line(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::key_unavailable, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r' || line.back() == ' ')) {
    line.pop_back();
  }
  return line;
}
}  // namespace

SigningKeyPair load_keypair(const std::filesystem::path& secret_path) {
  auto bytes = from_hex(read_hex_line(secret_path));
  if (bytes.size() != crypto_sign_SECRETKEYBYTES) {
    raise(Errc::malformed_key, secret_path.string() + ": expected 64-byte secret key");
  }
  auto kp = SigningKeyPair::from_secret_bytes(bytes);
  sodium_memzero(bytes.data(), bytes.size());
  return kp;
}

PublicKey load_public_key(const std::filesystem::path& pub_path) {
  return public_key_from_hex(read_hex_line(pub_path));
}

PublicKey public_key_from_hex(std::string_view hex) {
  auto bytes = from_hex(hex);
  if (bytes.size() != crypto_sign_PUBLICKEYBYTES) {
    raise(Errc::malformed_key, "expected 32-byte public key");
  }
  PublicKey pub{};
  std::memcpy(pub.data(), bytes.data(), bytes.size());
  return pub;
}

}  // namespace ppdp
