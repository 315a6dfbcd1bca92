#pragma once

#include <stdexcept>
#include <string>

namespace eakf {

/// Raised on contract violations: bad shapes, non-finite input, failed
/// factorizations, inconsistent decomposition bases.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eakf
