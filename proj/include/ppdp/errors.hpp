#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppdp {

// Every failure mode the toolkit reports. The CLI maps any Error to exit
// code 2; negative verdicts are not errors and travel through return values.
enum class Errc {
  invalid_parameter,
  malformed_snapshot,
  malformed_key,
  duplicate_user,
  unknown_user,
  signature_required,
  signature_invalid,
  double_snapshot,
  missing_record,
  missing_snapshot,
  snapshot_withheld,
  attestation_mismatch,
  key_unavailable,
  key_exists,
  state_exists,
  state_missing,
  state_locked,
  empty_range,
  unknown_scenario,
  io_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ppdp
