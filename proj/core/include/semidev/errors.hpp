#pragma once

#include <stdexcept>
#include <string>

namespace semidev {

// Parameter/validation failures map to std::invalid_argument, precondition
// violations to std::domain_error. The three below carry extra meaning.

struct DegenerateTruncationError : std::runtime_error {
  explicit DegenerateTruncationError(const std::string& what)
      : std::runtime_error(what) {}
};

struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semidev
