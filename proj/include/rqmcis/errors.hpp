#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rqmcis {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Index outside the addressable range (e.g. a Sobol index >= 2^32).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Requested size exceeds what a table or buffer can supply.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Iterative or floating-point failure: non-convergence, non-finite values.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace rqmcis
