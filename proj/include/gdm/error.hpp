#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gdm {

enum class ErrorKind {
  Config,      // malformed or out-of-range configuration
  Domain,      // argument outside an operation's domain
  Validation,  // a named structural condition failed
  Budget,      // enumeration or precision budget exceeded
  Convergence, // iterative solver did not converge
  Internal,    // two computation routes disagreed
};

const char* to_string(ErrorKind kind) noexcept;

/// Short "%.6g" rendering of a real for messages.
inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gdm
