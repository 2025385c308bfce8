#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace padyn {

// Root of every error raised by the library. `kind()` is a stable short
// identifier used in reports and for CLI exit-code mapping.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class PrimeMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "prime_mismatch"; }
};

class PrecisionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precision"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse"; }
};

// A digit function that should be bijective on its last variable is not.
// `digit` is the output index, `prefix` the fixed leading arguments.
class BijectivityViolation : public Error {
 public:
  BijectivityViolation(int digit, std::vector<unsigned> prefix, const std::string& what)
      : Error(what), digit_(digit), prefix_(std::move(prefix)) {}
  const char* kind() const noexcept override { return "bijectivity_violation"; }
  int digit() const { return digit_; }
  const std::vector<unsigned>& prefix() const { return prefix_; }

 private:
  int digit_;
  std::vector<unsigned> prefix_;
};

// Output digit depends on input digits beyond its declared arity.
class InconsistentScaling : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "inconsistent_scaling"; }
};

// A digit constraint in a solver had no solution (or several).
class ConstraintUnsolvable : public Error {
 public:
  ConstraintUnsolvable(int step, int digit, const std::string& what)
      : Error(what), step_(step), digit_(digit) {}
  const char* kind() const noexcept override { return "constraint_unsolvable"; }
  int step() const { return step_; }
  int digit() const { return digit_; }

 private:
  int step_;
  int digit_;
};

class HypothesisViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "hypothesis_violation"; }
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "verification_failure"; }
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "convergence_failure"; }
};

}  // namespace padyn
