#pragma once

#include <stdexcept>
#include <string>

namespace abh {

/// Failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorKind { config = 2, numeric = 3, regime = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Input outside the validity range of an approximation or formula.
class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what) : Error(ErrorKind::regime, what) {}
};

}  // namespace abh
