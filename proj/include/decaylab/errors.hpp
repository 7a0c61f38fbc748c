#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

// Caller supplied an argument outside the documented domain of an operation.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Function evaluated outside the branch where it is differentiable.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A mathematical precondition of an estimate does not hold for the data
// (budget exceeded, convexity condition violated, ...). Distinct from a
// numerical failure.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Numerical failure inside an algorithm. Carries the module and operation
// name so the CLI can report where it happened.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string module, std::string op, const std::string& what)
      : std::runtime_error(module + "." + op + ": " + what),
        module_(std::move(module)),
        op_(std::move(op)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }

 private:
  std::string module_;
  std::string op_;
};

}  // namespace decaylab
