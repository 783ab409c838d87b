#pragma once

#include <stdexcept>
#include <string>

namespace xview {

/// Malformed file contents or a failed filesystem operation. Invalid
/// in-memory arguments throw std::invalid_argument instead; the CLI maps
/// the two families to distinct exit codes.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xview
