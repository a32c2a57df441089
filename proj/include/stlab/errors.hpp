#pragma once

#include <stdexcept>
#include <string>

namespace stlab {

// Raised when an operation's stated precondition does not hold.
// The CLI maps this to exit code 2.
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a configured resource cap would be exceeded.
// The CLI maps this to exit code 3.
struct cap_error : std::runtime_error {
  explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a computation contradicts a statement that should hold on every
// valid instance. Seeing this exception is a test-failure signal, never a
// normal outcome. The CLI maps this to exit code 1.
struct invariant_violation : std::logic_error {
  explicit invariant_violation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace stlab
