#pragma once

#include <stdexcept>
#include <string>

namespace gossiplab {

// Matrix or vector shapes that do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Graph lacks a path structure that an operation relies on.
class ConnectivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedDiameterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dyadic denominator exponent passed the configured cap.
class DyadicOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidConstantsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by config ingestion; carries a line anchor when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace gossiplab
