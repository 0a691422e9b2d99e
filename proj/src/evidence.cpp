#include "ppdp/evidence.hpp"

#include "ppdp/errors.hpp"

namespace ppdp {

UserId::UserId(std::string value) : value_(std::move(value)) {
  if (value_.empty()) raise(Errc::invalid_parameter, "user id must be non-empty");
  if (value_.find('\0') != std::string::npos) {
    raise(Errc::invalid_parameter, "user id must not contain NUL");
  }
}

std::string_view variant_name(DigestVariant v) {
  return v == DigestVariant::plain ? "plain" : "signed";
}

DigestVariant variant_from_name(std::string_view name) {
  if (name == "plain") return DigestVariant::plain;
  if (name == "signed") return DigestVariant::signed_;
  raise(Errc::invalid_parameter, "unknown variant '" + std::string(name) + "'");
}

}  // namespace ppdp
