#include "netid/error.hpp"

namespace netid {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument:
      return "invalid_argument";
    case ErrorKind::validation:
      return "validation";
    case ErrorKind::io:
      return "io";
    case ErrorKind::stability:
      return "stability";
    case ErrorKind::simulation_divergence:
      return "simulation_divergence";
    case ErrorKind::order_too_large:
      return "order_too_large";
    case ErrorKind::insufficient_data:
      return "insufficient_data";
    case ErrorKind::degenerate_input:
      return "degenerate_input";
    case ErrorKind::degenerate_fit:
      return "degenerate_fit";
    case ErrorKind::degenerate_truth:
      return "degenerate_truth";
    case ErrorKind::numerical_failure:
      return "numerical_failure";
    case ErrorKind::internal_consistency:
      return "internal_consistency";
    case ErrorKind::generation_failure:
      return "generation_failure";
    case ErrorKind::protocol:
      return "protocol";
  }
  return "unknown";
}

}  // namespace netid
