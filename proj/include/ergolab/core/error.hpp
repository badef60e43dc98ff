#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model or argument outside the supported domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative or quadrature solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment configuration; `key` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace ergolab
