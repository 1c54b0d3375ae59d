#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gslope {

// Raised by parse_libsvm. line is 1-based; line==0 means the stream as a whole
// (e.g. empty input).
class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& msg)
      : std::runtime_error(line == 0 ? msg : "line " + std::to_string(line) + ": " + msg),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when a group removed by the screening rule turns out to be active in a
// reference solution, i.e. the safeness guarantee was violated.
class safeness_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gslope
