#ifndef LPEP_ERRORS_HPP_
#define LPEP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lpep {

// Bad caller input (dimension mismatches, out-of-support arguments).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed or inconsistent data files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear-algebra breakdowns (singular information matrix, Cholesky failure).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unusable run configuration (no admissible imaginary sample, bad bounds).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lpep

#endif  // LPEP_ERRORS_HPP_
