#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::domain_too_small: return "domain-too-small";
    case ErrorKind::gauge_singular: return "gauge-singular";
    case ErrorKind::integration_failure: return "integration-failure";
    case ErrorKind::undefined_rate: return "undefined-rate";
    case ErrorKind::spectral_failure: return "spectral-failure";
    case ErrorKind::out_of_strip: return "out-of-strip";
    case ErrorKind::stiff_failure: return "stiff-failure";
    case ErrorKind::degenerate_parameter: return "degenerate-parameter";
    case ErrorKind::inconsistent_wronskian: return "inconsistent-wronskian";
    case ErrorKind::eigenvalue_singularity: return "eigenvalue-singularity";
    case ErrorKind::evaluation_domain: return "evaluation-domain";
    case ErrorKind::pole: return "pole";
    case ErrorKind::shooting_bracket: return "shooting-bracket";
    case ErrorKind::partial_result: return "partial-result";
    case ErrorKind::schema_mismatch: return "schema-mismatch";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::domain_too_small:
    case ErrorKind::out_of_strip:
    case ErrorKind::degenerate_parameter:
    case ErrorKind::evaluation_domain:
    case ErrorKind::schema_mismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace blowup
