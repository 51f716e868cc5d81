#pragma once

#include <stdexcept>
#include <string>

namespace occmob {

// Error categories map onto CLI exit codes (2/3/4).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Carries a short machine-readable kind ("degenerate-variable",
// "singular-design", "insufficient-pairs", "unstable-bootstrap", ...).
struct NumericError : std::runtime_error {
  std::string kind;
  NumericError(std::string k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

}  // namespace occmob
