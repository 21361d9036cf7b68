#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "awstab/numkit.hpp"

namespace awstab::operators {

/// Eigenphase theta of a unimodular scalar e^{2 pi i theta}. When the phase is
/// a rational number the reduced fraction is kept so that powers reduce
/// modulo the denominator exactly (needed for exponents like p(n) ~ 1e12).
struct Angle {
  double value = 0.0;
  std::optional<std::pair<std::int64_t, std::int64_t>> exact;  // num/den reduced, den > 0

  static Angle real(double v) { return {v, std::nullopt}; }
  static Angle fraction(std::int64_t num, std::int64_t den);

  /// e^{2 pi i theta n} (conjugated when conj is set).
  cd phase_power(std::uint64_t n, bool conj = false) const;
};

/// Finitely supported vector over integer indices; the working model of an
/// l^2 vector for the shift operators.
struct SupportVec {
  std::map<std::int64_t, cd> coeff;

  static SupportVec basis(std::int64_t k) {
    SupportVec v;
    v.coeff[k] = cd(1.0, 0.0);
    return v;
  }
  double squared_norm() const {
    double s = 0.0;
    for (const auto& [k, v] : coeff) s += std::norm(v);
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }
  void prune(double eps = 0.0) {
    for (auto it = coeff.begin(); it != coeff.end();)
      it = (std::abs(it->second) <= eps) ? coeff.erase(it) : std::next(it);
  }
};

cd inner(const SupportVec& a, const SupportVec& b);  // conjugate-first
inline cd inner(const CVec& a, const CVec& b) { return a.dot(b); }

using HVec = std::variant<CVec, SupportVec>;

cd inner(const HVec& a, const HVec& b);
double norm(const HVec& v);

/// Uniform operator over dense matrices and exactly representable structured
/// operators. Immutable after construction; all operations are pure.
class Operator {
 public:
  enum class Kind { dense, diag_unitary, unilateral_shift, bilateral_shift, direct_sum };

  static Operator dense(CMat m);
  static Operator diag_unitary(std::vector<Angle> angles);
  static Operator unilateral_shift();
  static Operator bilateral_shift();
  static Operator direct_sum(std::vector<Operator> blocks);

  Kind kind() const { return kind_; }
  bool is_adjointed() const { return adjointed_; }
  /// nullopt for the countable-dimensional shifts.
  std::optional<Eigen::Index> dim() const;

  HVec apply(const HVec& v) const { return power_apply(1, v); }
  HVec adjoint_apply(const HVec& v) const { return adjoint().power_apply(1, v); }
  HVec power_apply(std::uint64_t n, const HVec& v) const;

  Operator adjoint() const;
  bool is_contraction(double tol = 1e-9) const;

  const CMat& dense_matrix() const;
  const std::vector<Angle>& angles() const;
  const std::vector<Operator>& blocks() const;

  /// Cost cap for dense power application, in scalar multiplications.
  Operator with_power_budget(std::uint64_t budget) const;
  std::uint64_t power_budget() const { return power_budget_; }

 private:
  Operator() = default;
  Kind kind_ = Kind::dense;
  bool adjointed_ = false;
  CMat mat_;
  std::vector<Angle> angles_;
  std::vector<Operator> blocks_;
  std::uint64_t power_budget_ = 1'000'000'000'000ull;
};

/// <g, op^n h> for each exponent in ascending order, stepping the orbit
/// incrementally between consecutive exponents.
std::vector<cd> orbit_inner(const Operator& op, const HVec& h, const HVec& g,
                            std::span<const std::uint64_t> exponents);

/// Materialize a finite-dimensional operator as a dense matrix (columns are
/// images of the basis vectors). Errors on the countable shifts.
CMat to_dense(const Operator& op);

/// Shared cache of repeated squares of a dense matrix, for loops that apply
/// many different powers of the same operator to vectors.
class DensePowerEngine {
 public:
  explicit DensePowerEngine(CMat m) : squares_{std::move(m)} {}
  CVec apply(std::uint64_t n, CVec v);

 private:
  std::vector<CMat> squares_;
};

}  // namespace awstab::operators
