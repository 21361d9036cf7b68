#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "awstab/numkit.hpp"
#include "awstab/operators.hpp"
#include "awstab/polyseq.hpp"

namespace awstab::ergodic {

using operators::Angle;

/// Finite matrix algebra M_d with the normalized trace phi(a) = tr(a)/d and
/// the inner automorphism beta(a) = u a u^{-1} of a unitary u. When u is a
/// diagonal of exact rational phases, powers of u reduce modulo the phase
/// denominators and stay exact for arbitrarily large exponents.
class MatrixAlgebra {
 public:
  static MatrixAlgebra dense_unitary(CMat u);
  static MatrixAlgebra diagonal(std::vector<Angle> angles);

  Eigen::Index dim() const { return d_; }
  const CMat& u() const { return u_; }
  bool exact_diagonal() const { return !angles_.empty(); }
  const std::vector<Angle>& angles() const { return angles_; }

  cd phi(const CMat& a) const;
  double phi_norm(const CMat& a) const;  // sqrt(phi(a* a))
  CMat beta(const CMat& a) const { return beta_power(1, a); }
  CMat beta_power(std::int64_t s, const CMat& a) const;  // u^s a u^{-s}

  /// u^e for e of either sign (negative realized through the adjoint).
  CMat u_power(std::int64_t e) const;

 private:
  MatrixAlgebra() = default;
  Eigen::Index d_ = 0;
  CMat u_;
  std::vector<Angle> angles_;
};

/// The data (k, r, alpha, p_1..p_r) of a polynomial multiple / entangled
/// average; alpha maps positions {1..k} onto variables {1..r}.
struct AverageRequest {
  int k = 1;
  int r = 1;
  std::vector<int> alpha;                // size k, 1-based values
  std::vector<polyseq::IntPoly> polys;   // size r, members of the class

  void validate() const;
};

/// Prefix sums s_l = sum_{d<=l} p_{alpha(d)}(n_{alpha(d)}), exact.
std::vector<std::int64_t> s_exponents(const AverageRequest& req, std::span<const std::int64_t> ns);

inline constexpr std::uint64_t kDefaultComputeBudget = 100'000'000ull;

/// (1/N^r) sum over tuples of beta^{s_1}(a_1) ... beta^{s_k}(a_k), with a
/// fixed pairwise reduction tree (bitwise reproducible) and cached u-powers.
CMat multiple_average(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                      const AverageRequest& req, std::int64_t horizon,
                      std::uint64_t budget = kDefaultComputeBudget);

/// (1/N^r) sum of u^{p_{alpha(1)}(n_..)} A_1 ... u^{p_{alpha(k)}(n_..)} A_k u^{-s_k}.
CMat entangled_average(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                       const AverageRequest& req, std::int64_t horizon,
                       std::uint64_t budget = kDefaultComputeBudget);

/// Exact mean of zeta^{p(n)} over one period of p(n) mod ord(zeta); the
/// angle must be an exact rational (a root of unity).
cd root_phase_mean(const Angle& zeta, const polyseq::IntPoly& p);

/// Exact limit of the entangled average for a diagonal root-of-unity u:
/// entrywise path expansion with each free variable replaced by its
/// root-of-unity phase mean. Requires r <= 2.
CMat weyl_oracle(const std::vector<Angle>& angles, const std::vector<CMat>& as,
                 const AverageRequest& req);

struct EquivalenceReport {
  CMat via_beta;               // Eq-(1)-style route
  CMat via_u;                  // Eq-(3)-style route
  double max_discrepancy = 0;  // entrywise, must vanish
  double phi_cauchy_beta = 0;  // |S_N - S_{N/2}|_phi per route
  double phi_cauchy_u = 0;
};

EquivalenceReport equivalence_check(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                                    const AverageRequest& req, std::int64_t horizon,
                                    std::uint64_t budget = kDefaultComputeBudget);

struct AverageSeries {
  std::vector<std::int64_t> grid;
  std::vector<CMat> values;
  std::vector<double> phi_deltas;   // |S_{grid[i]} - S_{grid[i-1]}|_phi
  std::vector<double> norm_deltas;  // operator-norm version
};

AverageSeries average_series(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                             const AverageRequest& req, std::vector<std::int64_t> grid,
                             std::uint64_t budget = kDefaultComputeBudget);

/// phi(a0 S_N) per grid point: the weak-convergence pairing through the GNS
/// inner product.
std::vector<cd> gns_weak_series(const MatrixAlgebra& sys, const CMat& a0, const AverageSeries& s);

}  // namespace awstab::ergodic
