#pragma once

#include <stdexcept>
#include <string>

namespace ipp {

// Bad input: failed construction invariant, violated precondition, malformed
// request. CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A configured budget (lattice ceiling, step ceiling) cannot accommodate the
// request. CLI maps this to exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ipp
