#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bicsi {

/// Planar reference-point coordinate in meters.
struct Coord {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coord &, const Coord &) = default;
};

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric input outside the accepted domain (non-finite, negative amplitude).
class InputDomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `row()` is the 0-based physical line number.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t row)
      : Error(what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class EmptyTraceError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration: bad filter, unknown metric, infeasible
/// synthesis parameters. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two bit vectors (or vectors of reals) that must share a length do not.
class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

/// Label lookup failure, empty collections where one element is required.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace bicsi
