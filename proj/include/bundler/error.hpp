#pragma once

#include <stdexcept>
#include <string>

namespace bundler {

enum class ErrorKind {
  invalid_dimension,
  shape_mismatch,
  degenerate_basis,
  unsupported_frame,
  invalid_parameter,
  invalid_truncation,
  truncation_overflow,
  non_unique_steady_state,
  numerical,
  decomposition,
  manifold_degeneracy,
  invalid_order,
  integration,
  ratio_undefined,
  config,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can tell configuration problems from numerical ones.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline bool is_config_error(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config:
    case ErrorKind::invalid_parameter:
    case ErrorKind::invalid_dimension:
    case ErrorKind::invalid_order:
    case ErrorKind::invalid_truncation:
    case ErrorKind::unsupported_frame:
      return true;
    default:
      return false;
  }
}

}  // namespace bundler
