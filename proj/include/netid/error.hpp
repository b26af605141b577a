#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netid {

enum class ErrorKind {
  invalid_argument,
  validation,
  io,
  stability,
  simulation_divergence,
  order_too_large,
  insufficient_data,
  degenerate_input,
  degenerate_fit,
  degenerate_truth,
  numerical_failure,
  internal_consistency,
  generation_failure,
  protocol,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can report it as JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace netid
