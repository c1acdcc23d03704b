#pragma once

#include <stdexcept>
#include <string>

namespace ergo {

// A state or query point lies outside the search domain.
struct domain_violation : std::runtime_error {
  explicit domain_violation(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric routine produced a non-finite or otherwise unusable value.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A text input (grid file, CSV, config) could not be parsed.
// `line` is 1-based; 0 means the error is not tied to a specific line.
struct parse_error : std::runtime_error {
  int line;
  parse_error(const std::string& msg, int line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"),
        line(line_no) {}
};

}  // namespace ergo
