#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace etdlab {

/// Invalid experiment, oracle or chain configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the domain an operation is defined on (e.g. a state outside the tile grid).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a structural precondition such as a dimension match.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The behavior policy gives zero probability to an action that was taken.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (I - P Gamma Lambda) is singular, so the lambda-return operator does not exist.
class DegenerateLambdaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No unique positive stationary distribution could be found.
class IrreducibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace etdlab
