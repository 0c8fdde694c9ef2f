#pragma once

#include <stdexcept>
#include <string>

namespace apsim {

// Every error raised by the library derives from Error. kind() is a short
// stable token ("domain", "config", ...) used by the CLI for its one-line
// machine-parsable error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain", what) {}
};

// Invalid configuration value (block size, gain, std, ...).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Inputs that are individually valid but inconsistent with each other.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("input", what) {}
};

// Least-squares fit could not be performed.
class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error("fit", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what) : Error("lookup", what) {}
};

}  // namespace apsim
