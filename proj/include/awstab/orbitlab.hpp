#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "awstab/operators.hpp"
#include "awstab/polyseq.hpp"

namespace awstab::orbitlab {

/// Running means m_n = (1/n) sum_{k<=n} y_k, fixed left-to-right summation.
std::vector<double> cesaro(std::span<const double> y);
std::vector<cd> cesaro(std::span<const cd> y);

/// Density-one index selection produced by the extractor. Indices are 1-based
/// positions into the source series. Block b covers positions from its start
/// to the next block's start; inside a block at level m the selection keeps
/// exactly the positions with y < 2^-m.
struct Selection {
  std::int64_t horizon = 0;
  std::vector<std::int64_t> indices;                  // strictly increasing
  std::vector<std::pair<std::int64_t, int>> blocks;   // (start position, level)
  std::vector<std::pair<std::int64_t, double>> density_profile;

  /// |{k : n_k <= n}| / n by exact recount.
  double density_at(std::int64_t n) const;
  /// Threshold level in force at position n.
  int level_at(std::int64_t n) const;
  bool contains(std::int64_t n) const;
};

/// Constructive finite-horizon Koopman-von Neumann extraction with threshold
/// ladder eps_m = 2^-m. Block boundaries advance greedily at the earliest
/// position from which the candidate set {y < eps_{m+1}} keeps running density
/// >= 1 - 2^-(m+2) on every window reaching the horizon. An empty selection
/// (series bounded away from zero) is a valid result, not an error.
Selection kvn_extract(std::span<const double> y);

/// One selection along which every series in the family is small: the
/// extractor applied to the pointwise maximum. This is the finite-family,
/// finite-horizon stand-in for the countable diagonal argument; the infinite
/// diagonalization schedule is deliberately out of scope.
Selection joint_kvn(const std::vector<std::vector<double>>& ys);

struct ConverseBound {
  double cesaro_at_horizon = 0.0;
  double upper_bound = 0.0;  // (1 - density) * bound + max selected value
};

/// Quantities behind the easy direction of the equivalence: the Cesaro mean
/// at the horizon is at most (1 - density) * bound + max_{selected} y.
ConverseBound kvn_converse_check(std::span<const double> y, const Selection& sel, double bound);

/// Finite-horizon van der Corput correlation statistics for lags 1..lag_max:
///   gamma_j       = |(1/N) sum_{n <= N-j} <h_n, h_{n+j}>|
///   gamma_tilde_j = (1/N) sum_{n <= N-j} |<h_n, h_{n+j}>|
/// with the same partial statistics at N/2 and N/4 so that trend surrogates
/// for the limsup are testable.
struct VdcStats {
  std::int64_t horizon = 0;
  int lag_max = 0;
  std::vector<double> gamma, gamma_tilde;
  std::vector<double> gamma_half, gamma_tilde_half;
  std::vector<double> gamma_quarter, gamma_tilde_quarter;
};

using OrbitFn = std::function<operators::HVec(std::int64_t)>;  // n -> h_n, 1-based

/// Sequential orbit n -> T^{p(n)} h for n = 1, 2, ...: steps by the exponent
/// increment while p grows (it eventually does for class members) and
/// restarts from h across the occasional early dip.
OrbitFn polynomial_orbit(const operators::Operator& op, const operators::HVec& h,
                         const polyseq::IntPoly& p);

/// Requires the normalization |h_n| <= 1; violation is an error.
VdcStats vdc_stats(const OrbitFn& orbit, std::int64_t horizon, int lag_max);
VdcStats vdc_stats(const std::vector<operators::HVec>& orbit, int lag_max);

struct FunctionalReport {
  std::vector<double> y;            // y_n = |<g, T^{p(n)} h>|
  std::vector<double> cesaro_means;
  Selection selection;
  double cesaro_at_horizon = 0.0;
  bool below_threshold = false;
};

struct AwsReport {
  std::int64_t horizon = 0;
  double tau = 0.0;
  std::vector<FunctionalReport> per_functional;
  Selection joint;
  bool verdict = false;  // all functionals below tau at the horizon
};

/// Almost-weak-stability evidence for the orbit T^{p(n)} h against a family
/// of test functionals. tau < 0 selects the default 10 / sqrt(horizon), a
/// calibrated heuristic (decaying orbits clear it, rotations fail it), not a
/// theorem.
AwsReport aws_verdict(const operators::Operator& op, const operators::HVec& h,
                      const std::vector<operators::HVec>& functionals,
                      const polyseq::IntPoly& p, std::int64_t horizon, double tau = -1.0);

}  // namespace awstab::orbitlab
