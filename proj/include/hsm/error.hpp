#pragma once

#include <stdexcept>
#include <string>

namespace hsm {

/// Bad arguments or violated preconditions. Maps to CLI exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A domain specification that fails validation; `path()` names the offending
/// element (JSON-pointer style, e.g. "/vertices/3").
class DomainSpecError : public InvalidInput {
 public:
  DomainSpecError(std::string path, const std::string& what)
      : InvalidInput(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A test function that violates the support/vanishing preconditions of an
/// inequality check (e.g. support leaving the open set).
class PreconditionViolation : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Numerical breakdown: non-finite values, failed factorizations, infinite
/// weights. Maps to CLI exit code 3.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Davies average of d_e^{-p} vanished, i.e. every sampled line through x
/// stays inside the domain.
class InfiniteWeight : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// A quadratic form that should be positive came out nonpositive on the
/// discrete level (grid too coarse, support too close to the boundary).
class NonpositiveForm : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace hsm
