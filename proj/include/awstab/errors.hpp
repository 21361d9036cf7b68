#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace awstab {

// Bad inputs / violated preconditions. CLI maps these to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime numerical failure: non-convergence, overflow, exhausted budget.
// CLI maps these to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

struct NegativeValueError : ValidationError {
  using ValidationError::ValidationError;
};

struct OverflowError : NumericalError {
  using NumericalError::NumericalError;
};

struct BudgetError : NumericalError {
  using NumericalError::NumericalError;
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 overflow in addition");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int64 overflow in subtraction");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 overflow in multiplication");
  return r;
}

}  // namespace awstab
