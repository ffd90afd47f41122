#pragma once

#include <stdexcept>
#include <string>

namespace shadowfield {

/// Raised for unreadable files, malformed headers and truncated payloads.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shadowfield
