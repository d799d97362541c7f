#pragma once

#include <stdexcept>
#include <string>

namespace hrafl {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (CSV, labels, shapes).
class DataError : public Error {
 public:
  using Error::Error;
};

// Violated precondition on an argument (dimension mismatch, bad count).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Scenario configuration problems. key() names the offending dotted key.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace hrafl
