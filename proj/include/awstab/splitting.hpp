#pragma once

#include <string>
#include <vector>

#include "awstab/numkit.hpp"
#include "awstab/operators.hpp"

namespace awstab::splitting {

struct SplitPart {
  std::string label;  // H_u, H_0, H_r, H_s, H_us
  CMat basis;         // orthonormal columns
  Eigen::Index dim() const { return basis.cols(); }
};

/// Orthogonal decomposition of a finite-dimensional contraction into labeled
/// invariant parts, with diagnostics. The split is discontinuous in the data
/// near |lambda| = 1 - tol; warnings flag tolerance-sensitive inputs rather
/// than silently classifying them.
struct SplitResult {
  std::vector<SplitPart> parts;
  double tol = 0.0;
  std::vector<std::string> warnings;
  /// stability evidence rows: description and Cesaro value at the horizon.
  /// Finite horizons can only ever corroborate weak accumulation at zero,
  /// never certify it; consumers must read these as evidence, not proof.
  std::vector<std::pair<std::string, double>> evidence;
  /// per-part invariance defect |(I - P) T B|.
  std::vector<std::pair<std::string, double>> residuals;

  const SplitPart& part(const std::string& label) const;
  bool has_part(const std::string& label) const;
  Eigen::Index ambient() const;
};

/// Unitary (+) completely-non-unitary decomposition: H_u is the joint kernel
/// of I - T*^n T^n and I - T^n T*^n over n = 1..dim, computed by stacked
/// kernel intersection; H_0 is its orthogonal complement.
SplitResult foguel_split(const CMat& t, double tol = 1e-8);

/// Reversible (+) stable decomposition: H_r spans the eigenvectors with
/// |lambda| >= 1 - tol (eigenvalue clusters resolved through exact kernel
/// extraction), H_s is the complement. Evidence rows sample Cesaro means of
/// |<g, T^n h>| for h, g drawn from H_s.
SplitResult jdlg_split(const CMat& t, double tol = 1e-8, std::int64_t evidence_horizon = 2000,
                       std::uint64_t seed = 2024);

/// Three-way refinement H_r (+) H_us (+) H_0. In finite dimensions a unitary
/// restriction always diagonalizes, so H_us must come out zero; a nonzero
/// result is reported with a warning instead of being silently absorbed.
SplitResult three_way_split(const CMat& t, double tol = 1e-8);

/// Known splits of the structured countable-dimensional operators, stated by
/// kind and corroborated behaviorally (finite-horizon orbit decay), not
/// recomputed numerically.
struct DescriptiveSplit {
  std::vector<std::pair<std::string, std::string>> parts;  // label -> "zero" | "all"
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> evidence;
};

DescriptiveSplit three_way_structured(const operators::Operator& op, std::int64_t horizon = 4096);

}  // namespace awstab::splitting
