#pragma once

#include <stdexcept>
#include <string>

namespace sosiq {

// Base of all library errors. Subtypes map onto the CLI exit-code contract:
// Io/Format/Dimension/Parse errors are data errors (exit 2), numerical
// failures (exit 3) are NumericError.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

class ParamError : public Error {
 public:
  explicit ParamError(const std::string& msg) : Error(msg) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& msg) : Error(msg) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace sosiq
