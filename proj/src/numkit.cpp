#include "awstab/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>

namespace awstab::numkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Complex Givens rotation G = [[c, s], [-conj(s), c]] with real c, chosen so
// that G * [f, g]^T has zero second component.
struct Givens {
  double c;
  cd s;
};

Givens make_givens(cd f, cd g) {
  if (g == cd(0.0, 0.0)) return {1.0, cd(0.0, 0.0)};
  double ag = std::abs(g);
  if (f == cd(0.0, 0.0)) return {0.0, std::conj(g) / ag};
  double af = std::abs(f);
  double d = std::hypot(af, ag);
  return {af / d, (f / af) * (std::conj(g) / d)};
}

// Rows i, i+1 of h over columns [c0, c1).
void apply_left(CMat& h, const Givens& g, Eigen::Index i, Eigen::Index c0, Eigen::Index c1) {
  for (Eigen::Index j = c0; j < c1; ++j) {
    cd x = h(i, j), y = h(i + 1, j);
    h(i, j) = g.c * x + g.s * y;
    h(i + 1, j) = -std::conj(g.s) * x + g.c * y;
  }
}

// Columns i, i+1 of h over rows [r0, r1), multiplying by G^H on the right.
void apply_right(CMat& h, const Givens& g, Eigen::Index i, Eigen::Index r0, Eigen::Index r1) {
  for (Eigen::Index r = r0; r < r1; ++r) {
    cd x = h(r, i), y = h(r, i + 1);
    h(r, i) = g.c * x + std::conj(g.s) * y;
    h(r, i + 1) = -g.s * x + g.c * y;
  }
}

void hessenberg_inplace(CMat& h, CMat& q) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    CVec x = h.block(k + 1, k, len, 1);
    double xnorm = x.norm();
    if (xnorm == 0.0) continue;
    cd x0 = x(0);
    cd phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cd(1.0, 0.0);
    cd alpha = -phase * xnorm;
    CVec v = x;
    v(0) -= alpha;
    double vnorm = v.norm();
    if (vnorm <= kEps * xnorm) {
      for (Eigen::Index i = k + 2; i < n; ++i) h(i, k) = cd(0.0, 0.0);
      continue;
    }
    v /= vnorm;
    h.block(k + 1, k, len, n - k) -= 2.0 * v * (v.adjoint() * h.block(k + 1, k, len, n - k));
    h.block(0, k + 1, n, len) -= 2.0 * (h.block(0, k + 1, n, len) * v) * v.adjoint();
    q.block(0, k + 1, n, len) -= 2.0 * (q.block(0, k + 1, n, len) * v) * v.adjoint();
    h(k + 1, k) = alpha;
    for (Eigen::Index i = k + 2; i < n; ++i) h(i, k) = cd(0.0, 0.0);
  }
}

cd wilkinson_shift(const CMat& h, Eigen::Index m) {
  cd a = h(m - 1, m - 1), b = h(m - 1, m), c = h(m, m - 1), d = h(m, m);
  cd half = (a - d) * 0.5;
  cd disc = std::sqrt(half * half + b * c);
  cd mid = (a + d) * 0.5;
  cd s1 = mid + disc, s2 = mid - disc;
  return (std::abs(s1 - d) < std::abs(s2 - d)) ? s1 : s2;
}

}  // namespace

CMat mat_power(const CMat& m, std::uint64_t n) {
  if (m.rows() != m.cols()) throw DimensionError("mat_power: matrix must be square");
  CMat result = CMat::Identity(m.rows(), m.cols());
  if (n == 0) return result;
  CMat base = m;
  while (true) {
    if (n & 1u) result = result * base;
    n >>= 1;
    if (n == 0) break;
    base = base * base;
  }
  return result;
}

SchurResult schur(const CMat& a, int max_sweeps_per_eigenvalue) {
  if (a.rows() != a.cols()) throw DimensionError("schur: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n > kMaxEigenDim) throw ValidationError("schur: dimension above supported cap");
  CMat h = a;
  CMat q = CMat::Identity(n, n);
  if (n <= 1) return {q, h};
  hessenberg_inplace(h, q);

  const double hnorm = std::max(h.norm(), kEps);
  auto subdiag_small = [&](Eigen::Index i) {
    double bound = kEps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i)));
    if (bound == 0.0) bound = kEps * hnorm;
    return std::abs(h(i, i - 1)) <= bound;
  };

  Eigen::Index m = n - 1;
  int iters_at_m = 0;
  while (m > 0) {
    if (subdiag_small(m)) {
      h(m, m - 1) = cd(0.0, 0.0);
      --m;
      iters_at_m = 0;
      continue;
    }
    if (iters_at_m >= max_sweeps_per_eigenvalue)
      throw NumericalError("schur: QR iteration failed to converge");

    Eigen::Index l = m;
    while (l > 0 && !subdiag_small(l)) --l;
    // active block is [l, m] with h(l, l-1) negligible
    cd mu;
    if (iters_at_m > 0 && iters_at_m % 12 == 0) {
      mu = h(m, m) + cd(0.75 * std::abs(h(m, m - 1)), 0.0);  // exceptional shift
    } else {
      mu = wilkinson_shift(h, m);
    }

    for (Eigen::Index i = l; i <= m; ++i) h(i, i) -= mu;
    std::vector<Givens> rots((size_t)(m - l));
    for (Eigen::Index i = l; i < m; ++i) {
      Givens g = make_givens(h(i, i), h(i + 1, i));
      rots[(size_t)(i - l)] = g;
      apply_left(h, g, i, i, n);
      h(i + 1, i) = cd(0.0, 0.0);
    }
    for (Eigen::Index i = l; i < m; ++i) {
      const Givens& g = rots[(size_t)(i - l)];
      apply_right(h, g, i, 0, std::min(i + 2, m) + 1);
      apply_right(q, g, i, 0, n);
    }
    for (Eigen::Index i = l; i <= m; ++i) h(i, i) += mu;
    ++iters_at_m;
  }

  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) h(i, j) = cd(0.0, 0.0);
  return {q, h};
}

std::vector<EigenPair> eigen_decompose(const CMat& m, double tol) {
  if (m.rows() != m.cols()) throw DimensionError("eigen_decompose: matrix must be square");
  const Eigen::Index n = m.rows();
  if (n > kMaxEigenDim) throw ValidationError("eigen_decompose: dimension above supported cap");
  SchurResult s = schur(m);
  const CMat& t = s.t;
  const double tnorm = std::max(t.norm(), kEps);
  const double guard = kEps * tnorm;

  std::vector<EigenPair> pairs;
  pairs.reserve((size_t)n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cd lambda = t(i, i);
    CVec y = CVec::Zero(n);
    y(i) = cd(1.0, 0.0);
    for (Eigen::Index j = i - 1; j >= 0; --j) {
      cd acc(0.0, 0.0);
      for (Eigen::Index k = j + 1; k <= i; ++k) acc += t(j, k) * y(k);
      cd den = t(j, j) - lambda;
      if (std::abs(den) < guard) den = cd(guard, 0.0);
      y(j) = -acc / den;
      double mag = std::abs(y(j));
      if (mag > 1e100) y.segment(j, i - j + 1) /= mag;  // keep the solve in range
    }
    CVec v = s.q * y;
    double vn = v.stableNorm();
    if (vn == 0.0) {  // cannot happen with y(i)=1 and unitary q; keep a guard
      v = s.q.col(i);
      vn = 1.0;
    }
    v /= vn;
    pairs.push_back({lambda, v});
  }

  double mnorm = std::max(m.norm(), kEps);
  for (const auto& p : pairs) {
    double res = (m * p.vector - p.value * p.vector).norm();
    if (!(res <= tol * mnorm))
      throw NumericalError("eigen_decompose: residual above tolerance");
  }
  return pairs;
}

std::vector<CVec> kernel_basis(const CMat& m, double tol) {
  const Eigen::Index c = m.cols();
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  std::vector<CVec> out;
  if (smax == 0.0) {
    for (Eigen::Index j = 0; j < c; ++j) out.push_back(CVec::Unit(c, j));
    return out;
  }
  for (Eigen::Index j = 0; j < c; ++j) {
    double sigma = j < sv.size() ? sv(j) : 0.0;
    if (sigma <= tol * smax) out.push_back(svd.matrixV().col(j));
  }
  return out;
}

double op_norm(const CMat& m, double tol) {
  const Eigen::Index c = m.cols();
  if (c == 0 || m.rows() == 0) return 0.0;
  CMat w = m.adjoint() * m;
  double wtrace = w.real().trace();
  if (wtrace <= 0.0) return 0.0;

  // deterministic start: diagonal-weighted with a ramp to dodge orthogonal starts
  CVec v(c);
  for (Eigen::Index j = 0; j < c; ++j)
    v(j) = cd(std::sqrt(std::max(w(j, j).real(), 0.0)) + (double)(j + 1) / (double)(4 * c), 0.0);
  v.normalize();

  double rho = 0.0, prev_diff = -1.0;
  const int max_iters = 20000;
  for (int it = 0; it < max_iters; ++it) {
    CVec z = w * v;
    double zn = z.norm();
    if (zn == 0.0) {
      // start vector happened to sit in the kernel; restart from a basis vector
      Eigen::Index jmax = 0;
      w.diagonal().real().maxCoeff(&jmax);
      v = CVec::Unit(c, jmax);
      continue;
    }
    double rho_new = std::real(v.dot(z));  // Rayleigh quotient of w
    double diff = std::abs(rho_new - rho);
    v = z / zn;
    double resid = (w * v - rho_new * v).norm();
    if (it > 0) {
      double ratio = (prev_diff > 0.0) ? std::min(diff / prev_diff, 0.999) : 0.0;
      bool rayleigh_ok = diff <= tol * std::max(rho_new, kEps) * (1.0 - ratio);
      bool resid_ok = resid <= tol * std::max(rho_new, kEps);
      if (rayleigh_ok || resid_ok) {
        rho = rho_new;
        break;
      }
    }
    prev_diff = diff;
    rho = rho_new;
  }
  return std::sqrt(std::max(rho, 0.0));
}

CMat direct_sum(const CMat& a, const CMat& b) {
  CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

CMat orthonormalize_columns(const CMat& cols, double drop_tol) {
  const Eigen::Index n = cols.rows();
  std::vector<CVec> kept;
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    CVec v = cols.col(j);
    double orig = v.norm();
    if (orig == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const CVec& u : kept) v -= u.dot(v) * u;
    double vn = v.norm();
    if (vn <= drop_tol * orig) continue;
    kept.push_back(v / vn);
  }
  CMat out(n, (Eigen::Index)kept.size());
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) = kept[(size_t)j];
  return out;
}

CMat complement_basis(const CMat& basis, Eigen::Index ambient) {
  if (basis.cols() == 0) return CMat::Identity(ambient, ambient);
  if (basis.rows() != ambient) throw DimensionError("complement_basis: ambient mismatch");
  std::vector<CVec> ker = kernel_basis(basis.adjoint(), 1e-9);
  return basis_matrix(ker, ambient);
}

double subspace_angle(const CMat& a, const CMat& b) {
  if (a.cols() == 0 && b.cols() == 0) return 0.0;
  if (a.cols() == 0 || b.cols() == 0) return 1.0;
  CMat ra = b - a * (a.adjoint() * b);
  CMat rb = a - b * (b.adjoint() * a);
  return std::max(op_norm(ra, 1e-12), op_norm(rb, 1e-12));
}

}  // namespace awstab::numkit
