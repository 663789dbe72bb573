#pragma once

#include <stdexcept>
#include <string>

namespace phonfeat {

// Domain error raised by any module. The CLI maps these to exit code 1 and
// prints the message verbatim on stderr.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace phonfeat
