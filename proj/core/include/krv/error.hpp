#pragma once

#include <stdexcept>
#include <string>

namespace krv {

// Single exception type for all library-level failures. Messages are
// meant to be printable as-is by CLI error handlers.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace krv
