#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aba {

// Stable machine-readable error codes. The string form (see to_string) is
// part of the service protocol and must not change.
enum class Errc {
  invalid_argument,
  invalid_config,
  pack_empty,
  pack_invalid,
  malformed_item,
  duplicate_item,
  duplicate_classification,
  unknown_classification,
  classification_in_use,
  item_not_found,
  classification_not_found,
  prompt_outstanding,
  no_outstanding_prompt,
  choice_out_of_range,
  non_monotonic_timestamp,
  parse_error,
  integrity_error,
  version_mismatch,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// One broken content rule. `rule` is one of the names in content.hpp.
struct Violation {
  std::string rule;
  std::string subject_id;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

// Raised when content is rejected; carries every violation found.
class ValidationError : public Error {
 public:
  ValidationError(Errc code, const std::string& message, ValidationReport report)
      : Error(code, message), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace aba
