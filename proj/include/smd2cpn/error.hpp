#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smd2cpn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in an SMDL or CPN XML document. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Reference to a state, transition or net node that does not exist.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace smd2cpn
