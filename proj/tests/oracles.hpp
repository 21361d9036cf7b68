#pragma once

// Independent reference computations used by the tests. These deliberately
// take the dumbest correct route (schoolbook loops, sequential products,
// closed forms) so they share no code path with the library.

#include <complex>
#include <cstdint>
#include <vector>

#include "awstab/numkit.hpp"

namespace oracles {

using awstab::cd;
using awstab::CMat;
using awstab::CVec;

inline CMat schoolbook_matmul(const CMat& a, const CMat& b) {
  CMat out = CMat::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      cd acc(0.0, 0.0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

inline CMat sequential_power(const CMat& m, unsigned n) {
  CMat out = CMat::Identity(m.rows(), m.cols());
  for (unsigned i = 0; i < n; ++i) out = schoolbook_matmul(out, m);
  return out;
}

/// Roots of the characteristic polynomial of a 2x2 matrix by the quadratic
/// formula.
inline std::pair<cd, cd> quadratic_eigenvalues(const CMat& m) {
  cd tr = m(0, 0) + m(1, 1);
  cd det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  cd disc = std::sqrt(tr * tr - 4.0 * det);
  return {(tr + disc) * 0.5, (tr - disc) * 0.5};
}

/// Exact count of perfect squares <= n.
inline std::int64_t squares_up_to(std::int64_t n) {
  std::int64_t k = (std::int64_t)std::sqrt((double)n);
  while (k * k > n) --k;
  while ((k + 1) * (k + 1) <= n) ++k;
  return k;
}

/// Exact count of perfect cubes <= n.
inline std::int64_t cubes_up_to(std::int64_t n) {
  std::int64_t k = (std::int64_t)std::cbrt((double)n);
  while (k * k * k > n) --k;
  while ((k + 1) * (k + 1) * (k + 1) <= n) ++k;
  return k;
}

}  // namespace oracles
