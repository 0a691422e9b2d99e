#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ppdp {

// Email-style identifier; length-prefixed into digests, so it must not
// contain NUL and must be non-empty.
class UserId {
 public:
  explicit UserId(std::string value);

  const std::string& value() const noexcept { return value_; }

  friend bool operator==(const UserId&, const UserId&) = default;
  friend auto operator<=>(const UserId&, const UserId&) = default;

 private:
  std::string value_;
};

enum class DigestVariant : std::uint8_t {
  plain,    // H(len(user) || user || file bytes)
  signed_,  // H(len(user) || user || user-signature over the file)
};

std::string_view variant_name(DigestVariant v);
DigestVariant variant_from_name(std::string_view name);

// Fixed-width digest binding evidence to a user. The variant tag travels
// with the value so plain and signed digests never compare equal silently.
struct EvidenceDigest {
  std::array<std::uint8_t, 32> bytes{};
  DigestVariant variant{DigestVariant::plain};

  friend bool operator==(const EvidenceDigest&, const EvidenceDigest&) = default;
};

}  // namespace ppdp
