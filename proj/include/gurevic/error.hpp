#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gurevic {

// Base of every error raised by the library. The CLI maps each subclass to an
// exit code (config 2, budget 3, numerical 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0)
      : Error(line > 0 ? message + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"
                       : message),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const char* kind() const noexcept override { return "config"; }

 private:
  int line_;
  int column_;
};

// A structurally well-formed input that violates a model constraint
// (dead state, edge value on a forbidden edge, mismatched group variant).
class ValidationError : public ConfigError {
 public:
  explicit ValidationError(const std::string& message) : ConfigError(message) {}
  const char* kind() const noexcept override { return "validation"; }
};

// Operation called outside its precondition (forbidden word, wrong dimension).
class ContractError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract"; }
};

class BudgetError : public Error {
 public:
  BudgetError(const std::string& message, std::size_t requested, std::size_t budget)
      : Error(message + " (requested " + std::to_string(requested) + " entries, budget " +
              std::to_string(budget) + ")"),
        requested_(requested),
        budget_(budget) {}
  std::size_t requested() const noexcept { return requested_; }
  std::size_t budget() const noexcept { return budget_; }
  const char* kind() const noexcept override { return "budget"; }

 private:
  std::size_t requested_;
  std::size_t budget_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double achieved)
      : Error(message + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }
  const char* kind() const noexcept override { return "numerical"; }

 private:
  double achieved_;
};

}  // namespace gurevic
