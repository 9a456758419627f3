#pragma once

#include <stdexcept>
#include <string>

namespace gelkit {

// Invalid input or out-of-domain argument (bad mixture, c > 1, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A computation failed to reach its accuracy contract (integrator drift,
// fixed-point non-convergence, backend cross-check mismatch).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gelkit
