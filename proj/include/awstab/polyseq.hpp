#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "awstab/errors.hpp"

namespace awstab::polyseq {

/// Integer-coefficient polynomial, coefficients stored constant term first
/// ([3, -4, 2] is 2X^2 - 4X + 3). All arithmetic is exact 64-bit with loud
/// overflow errors; there is no silent wrap and no arbitrary precision.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<std::int64_t> coeffs);
  IntPoly(std::initializer_list<std::int64_t> coeffs)
      : IntPoly(std::vector<std::int64_t>(coeffs)) {}

  const std::vector<std::int64_t>& coeffs() const { return c_; }
  /// -1 for the zero polynomial.
  int degree() const { return (int)c_.size() - 1; }
  std::int64_t leading() const { return c_.empty() ? 0 : c_.back(); }
  bool is_zero() const { return c_.empty(); }

  /// Exact Horner evaluation at any integer argument.
  std::int64_t at(std::int64_t x) const;

  /// Evaluation under the nonnegative-class contract: requires n >= 1 and a
  /// nonnegative value (NegativeValueError flags a violated membership
  /// precondition at this n).
  std::int64_t eval(std::int64_t n) const;

  /// p maps {1, 2, ...} into {0, 1, ...}.
  bool in_class_P() const;
  /// p maps {0, 1, ...} into {0, 1, ...} and p(0) = 0.
  bool in_class_P0() const;

  /// p(n0 + X + n) - p(n0 + X); degree drops by exactly one.
  IntPoly difference(std::int64_t n0, std::int64_t n) const;

  /// p(X + shift), exact binomial expansion.
  IntPoly shifted(std::int64_t shift) const;

  /// Least n0 >= 1 such that p(m+1) > p(m) for all m >= n0. Requires a
  /// non-constant member of the nonnegative class. Found from the root bound
  /// of the forward difference plus a downward scan.
  std::int64_t monotone_threshold() const;

  std::string to_string() const;

 private:
  std::vector<std::int64_t> c_;  // trimmed: either empty or back() != 0
};

/// Density of the value set of an affine polynomial aX + b in the positive
/// integers: exactly 1/a. Errors unless degree is 1 with positive slope.
double affine_density(const IntPoly& p);

}  // namespace awstab::polyseq
