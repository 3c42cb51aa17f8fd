#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gwshield {

// Invalid configuration values (bad distribution parameters, horizons, weights).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates an ordering precondition: out-of-order arrivals,
// non-monotone sequence numbers, negative interarrivals.
class OrderingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation argument is outside its documented domain.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CSV or scenario file. Carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gwshield
