#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

enum class ErrorKind {
  invalid_argument,
  domain_too_small,
  gauge_singular,
  integration_failure,
  undefined_rate,
  spectral_failure,
  out_of_strip,
  stiff_failure,
  degenerate_parameter,
  inconsistent_wronskian,
  eigenvalue_singularity,
  evaluation_domain,
  pole,
  shooting_bracket,
  partial_result,
  schema_mismatch,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// True for errors caused by bad input rather than by a numerical breakdown.
bool is_input_error(ErrorKind kind);

}  // namespace blowup
