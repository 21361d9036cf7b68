#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "awstab/errors.hpp"

namespace awstab {

template <class Scalar>
using MatrixC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using cd = std::complex<double>;
using CMat = MatrixC<double>;
using CVec = VectorC<double>;

/// e^{2*pi*i*turns}, with the integer part of `turns` removed exactly and the
/// quarter-turn values returned exactly (avoids sin(k*pi) != 0 drift).
inline cd unit_phase_turns(double turns) {
  double r = std::remainder(turns, 1.0);  // exact, in [-1/2, 1/2]
  if (r == 0.0) return cd(1.0, 0.0);
  if (r == 0.5 || r == -0.5) return cd(-1.0, 0.0);
  if (r == 0.25) return cd(0.0, 1.0);
  if (r == -0.25) return cd(0.0, -1.0);
  const double two_pi = 6.283185307179586476925286766559;
  return std::polar(1.0, two_pi * r);
}

/// Exact residue (num * k) mod den for den > 0, result in [0, den).
inline std::int64_t mulmod_i64(std::int64_t num, std::int64_t k, std::int64_t den) {
  __int128 r = (__int128)num * (__int128)k % (__int128)den;
  if (r < 0) r += den;
  return (std::int64_t)r;
}

namespace numkit {

inline constexpr int kMaxEigenDim = 64;
inline constexpr double kDefaultNullityTol = 1e-9;

/// m^n by binary exponentiation; mat_power(m, 0) is the identity.
CMat mat_power(const CMat& m, std::uint64_t n);

struct EigenPair {
  cd value;
  CVec vector;  // unit norm
};

/// Unitary similarity a = q t q^*, t upper triangular.
struct SchurResult {
  CMat q;
  CMat t;
};

/// Hessenberg reduction followed by shifted QR iteration.
/// Throws NumericalError if a subdiagonal fails to deflate within the sweep cap.
SchurResult schur(const CMat& a, int max_sweeps_per_eigenvalue = 100);

/// Eigenpairs with multiplicity (count equals dimension, <= kMaxEigenDim).
/// Every returned pair satisfies |m v - lambda v| <= tol * |m|.
std::vector<EigenPair> eigen_decompose(const CMat& m, double tol = 1e-10);

/// Orthonormal basis of the numerical kernel: right singular vectors whose
/// singular value is <= tol * (largest singular value).
std::vector<CVec> kernel_basis(const CMat& m, double tol = kDefaultNullityTol);

/// Largest singular value via power iteration on m^* m, relative tolerance tol.
double op_norm(const CMat& m, double tol = 1e-9);

CMat direct_sum(const CMat& a, const CMat& b);

/// Modified Gram-Schmidt with reorthogonalization; columns whose residual
/// drops below drop_tol (relative) are discarded.
CMat orthonormalize_columns(const CMat& cols, double drop_tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of span(basis) in C^ambient.
CMat complement_basis(const CMat& basis, Eigen::Index ambient);

/// sin of the largest principal angle between the column spans of two
/// orthonormal bases (symmetrized).
double subspace_angle(const CMat& a, const CMat& b);

inline CMat basis_matrix(const std::vector<CVec>& vs, Eigen::Index dim) {
  CMat b(dim, (Eigen::Index)vs.size());
  for (Eigen::Index j = 0; j < b.cols(); ++j) b.col(j) = vs[(size_t)j];
  return b;
}

}  // namespace numkit
}  // namespace awstab
