#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cure {

/// Bad user data: empty samples, negative or non-finite times.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Model for which the requested computation is undefined (e.g. infinite tau_H).
class UnsupportedModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: malformed model strings, copula parameter out of range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sample for which Q_n carries no information (all censored, or largest
/// observation uncensored).
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Quadrature failed to reach its tolerance within the evaluation budget.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved_error, std::size_t evaluations)
      : std::runtime_error(what), achieved_error_(achieved_error), evaluations_(evaluations) {}

  double achieved_error() const noexcept { return achieved_error_; }
  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  double achieved_error_;
  std::size_t evaluations_;
};

}  // namespace cure
