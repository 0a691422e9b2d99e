#include "ppdp/errors.hpp"

namespace ppdp {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::malformed_snapshot: return "malformed-snapshot";
    case Errc::malformed_key: return "malformed-key";
    case Errc::duplicate_user: return "duplicate-user";
    case Errc::unknown_user: return "unknown-user";
    case Errc::signature_required: return "signature-required";
    case Errc::signature_invalid: return "signature-invalid";
    case Errc::double_snapshot: return "double-snapshot-for-day";
    case Errc::missing_record: return "missing-record";
    case Errc::missing_snapshot: return "missing-snapshot";
    case Errc::snapshot_withheld: return "snapshot-withheld";
    case Errc::attestation_mismatch: return "attestation-mismatch";
    case Errc::key_unavailable: return "key-unavailable";
    case Errc::key_exists: return "existing-key-refusal";
    case Errc::state_exists: return "state-exists";
    case Errc::state_missing: return "state-missing";
    case Errc::state_locked: return "state-locked";
    case Errc::empty_range: return "empty-range";
    case Errc::unknown_scenario: return "unknown-scenario";
    case Errc::io_error: return "io-error";
  }
  return "unknown-error";
}

}  // namespace ppdp
