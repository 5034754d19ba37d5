#include "aba/error.hpp"

namespace aba {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_config: return "invalid-config";
    case Errc::pack_empty: return "pack-empty";
    case Errc::pack_invalid: return "pack-invalid";
    case Errc::malformed_item: return "malformed-item";
    case Errc::duplicate_item: return "duplicate-item";
    case Errc::duplicate_classification: return "duplicate-classification";
    case Errc::unknown_classification: return "unknown-classification";
    case Errc::classification_in_use: return "classification-in-use";
    case Errc::item_not_found: return "item-not-found";
    case Errc::classification_not_found: return "classification-not-found";
    case Errc::prompt_outstanding: return "prompt-outstanding";
    case Errc::no_outstanding_prompt: return "no-outstanding-prompt";
    case Errc::choice_out_of_range: return "choice-out-of-range";
    case Errc::non_monotonic_timestamp: return "non-monotonic-timestamp";
    case Errc::parse_error: return "parse-error";
    case Errc::integrity_error: return "integrity-error";
    case Errc::version_mismatch: return "version-mismatch";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace aba
