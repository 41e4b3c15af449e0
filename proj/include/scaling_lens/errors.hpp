#pragma once

#include <stdexcept>
#include <string>

namespace scaling_lens {

// Invalid inputs (bad parameters, out-of-range arguments). The CLI maps these
// to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation could not produce a meaningful number. The CLI maps these to
// exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateThreshold : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonPositiveRadicand : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BudgetExceeded : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientPoints : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyGrid : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace scaling_lens
