#include <doctest.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "awstab/numkit.hpp"
#include "awstab/rng.hpp"
#include "oracles.hpp"
#include <Eigen/SVD>

using namespace awstab;
using namespace awstab::numkit;

namespace {

// multiset match of eigenvalues, greedy nearest pairing
bool values_match(std::vector<cd> got, std::vector<cd> want, double tol) {
  if (got.size() != want.size()) return false;
  for (cd w : want) {
    auto best = got.end();
    double bd = 1e300;
    for (auto it = got.begin(); it != got.end(); ++it) {
      double d = std::abs(*it - w);
      if (d < bd) {
        bd = d;
        best = it;
      }
    }
    if (best == got.end() || bd > tol) return false;
    got.erase(best);
  }
  return true;
}

std::vector<cd> eigenvalues_of(const CMat& m, double tol = 1e-10) {
  std::vector<cd> vals;
  for (const auto& p : eigen_decompose(m, tol)) vals.push_back(p.value);
  return vals;
}

}  // namespace

TEST_CASE("matrix product: identity and diagonal cases") {
  Rng rng(42);
  CMat m = random_matrix(rng, 2, 2);
  CMat i2 = CMat::Identity(2, 2);
  CHECK(((i2 * m) - m).norm() == 0.0);

  CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
  a.diagonal() << cd(2, 0), cd(3, 0);
  b.diagonal() << cd(5, 0), cd(7, 0);
  CMat ab = a * b;
  CHECK(ab(0, 0) == cd(10, 0));
  CHECK(ab(1, 1) == cd(21, 0));
  CHECK(std::abs(ab(0, 1)) == 0.0);
}

TEST_CASE("matrix product matches schoolbook oracle") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    CMat a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
    CMat got = a * b, want = oracles::schoolbook_matmul(a, b);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("product associativity and adjoint involution") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(5);
    CMat a = random_matrix(rng, d, d), b = random_matrix(rng, d, d), c = random_matrix(rng, d, d);
    CHECK(((a * b) * c - a * (b * c)).cwiseAbs().maxCoeff() <= 1e-12 * (double)d);
    CMat aa = a.adjoint().adjoint();
    CHECK((aa - a).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("adjoint moves across the inner product") {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(7);
    CMat m = random_matrix(rng, d, d);
    CVec u = random_unit_vector(rng, d), v = random_unit_vector(rng, d);
    // inner(Mu, v) = inner(u, M* v) in the conjugate-first convention
    CHECK(std::abs(CVec(m * u).dot(v) - u.dot(m.adjoint() * v)) <= 1e-12 * (double)d);
  }
}

TEST_CASE("mat_power: trivial exponents") {
  Rng rng(3);
  CMat m = random_matrix(rng, 3, 3);
  CHECK((mat_power(m, 0) - CMat::Identity(3, 3)).norm() == 0.0);
  CHECK((mat_power(m, 1) - m).norm() == 0.0);
}

TEST_CASE("mat_power matches sequential multiplication oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    CMat m = random_contraction(rng, 4, 0.95);
    CMat got = mat_power(m, 13);
    CMat want = oracles::sequential_power(m, 13);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("mat_power additivity on contractions") {
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    CMat m = random_contraction(rng, 3, 1.0);
    unsigned a = (unsigned)rng.below(20), b = (unsigned)rng.below(20);
    CMat lhs = mat_power(m, a + b);
    CMat rhs = mat_power(m, a) * mat_power(m, b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("mat_power rejects rectangular input") {
  CMat m = CMat::Zero(2, 3);
  CHECK_THROWS_AS((void)mat_power(m, 2), DimensionError);
}

TEST_CASE("eigen: diagonal matrix") {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = cd(0.5, 0.0);
  m(1, 1) = std::polar(1.0, M_PI / 3.0);
  CHECK(values_match(eigenvalues_of(m), {cd(0.5, 0), std::polar(1.0, M_PI / 3.0)}, 1e-12));
}

TEST_CASE("eigen: identity has eigenvalue 1 with full multiplicity") {
  auto pairs = eigen_decompose(CMat::Identity(5, 5), 1e-12);
  CHECK(pairs.size() == 5);
  for (const auto& p : pairs) CHECK(std::abs(p.value - cd(1, 0)) <= 1e-14);
}

TEST_CASE("eigen: random 2x2 matches quadratic-formula oracle") {
  Rng rng(23);
  for (int rep = 0; rep < 50; ++rep) {
    CMat m = random_matrix(rng, 2, 2);
    auto [l1, l2] = oracles::quadratic_eigenvalues(m);
    CHECK(values_match(eigenvalues_of(m), {l1, l2}, 1e-10));
  }
}

TEST_CASE("eigen: residuals within tolerance across a mixed battery") {
  Rng rng(29);
  for (int rep = 0; rep < 40; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(15);
    CMat m;
    switch (rep % 4) {
      case 0: m = random_matrix(rng, d, d); break;
      case 1: m = random_unitary(rng, d); break;
      case 2: m = random_contraction(rng, d, 0.9); break;
      default: {
        m = CMat::Zero(d, d);  // nilpotent Jordan chain
        for (Eigen::Index i = 0; i + 1 < d; ++i) m(i, i + 1) = cd(1.0, 0.0);
      }
    }
    auto pairs = eigen_decompose(m, 1e-9);
    CHECK(pairs.size() == (size_t)d);
    double mn = std::max(m.norm(), 1e-300);
    for (const auto& p : pairs) {
      CHECK((m * p.vector - p.value * p.vector).norm() <= 1e-9 * mn);
      CHECK(std::abs(p.vector.norm() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("eigen: unitary similarity recovers planted spectrum") {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Index d = 3 + (Eigen::Index)rng.below(6);
    CMat diag = CMat::Zero(d, d);
    std::vector<cd> want;
    for (Eigen::Index i = 0; i < d; ++i) {
      cd v = std::polar(rng.uniform(0.1, 1.0), rng.uniform(0.0, 6.28));
      diag(i, i) = v;
      want.push_back(v);
    }
    CMat w = random_unitary(rng, d);
    CMat m = w * diag * w.adjoint();
    CHECK(values_match(eigenvalues_of(m, 1e-9), want, 1e-8));
  }
}

TEST_CASE("eigen: dimension cap is enforced") {
  CMat big = CMat::Identity(65, 65);
  CHECK_THROWS_AS((void)eigen_decompose(big, 1e-8), ValidationError);
}

TEST_CASE("schur reports non-convergence when the sweep budget is exhausted") {
  Rng rng(33);
  CMat m = random_matrix(rng, 6, 6);
  CHECK_THROWS_AS((void)schur(m, 0), NumericalError);
}

TEST_CASE("kernel_basis: zero, identity, rank-one") {
  CHECK(kernel_basis(CMat::Zero(3, 3)).size() == 3);
  CHECK(kernel_basis(CMat::Identity(4, 4)).empty());

  Rng rng(37);
  CVec u = random_unit_vector(rng, 4), v = random_unit_vector(rng, 4);
  CMat m = u * v.adjoint();
  auto ker = kernel_basis(m);
  REQUIRE(ker.size() == 3);
  for (const auto& w : ker) {
    CHECK(std::abs(v.dot(w)) <= 1e-10);
    CHECK((m * w).norm() <= 1e-10);
  }
  // orthonormality
  for (size_t i = 0; i < ker.size(); ++i)
    for (size_t j = 0; j < ker.size(); ++j) {
      double want = i == j ? 1.0 : 0.0;
      CHECK(std::abs(ker[i].dot(ker[j]) - cd(want, 0)) <= 1e-12);
    }
}

TEST_CASE("op_norm: unitary, diagonal, nilpotent shift") {
  Rng rng(41);
  CMat u = random_unitary(rng, 5);
  CHECK(op_norm(u) == doctest::Approx(1.0).epsilon(1e-9));

  CMat d = CMat::Zero(2, 2);
  d.diagonal() << cd(0.5, 0), cd(0.3, 0);
  CHECK(op_norm(d) == doctest::Approx(0.5).epsilon(1e-9));

  CMat s = CMat::Zero(2, 2);
  s(0, 1) = cd(1, 0);
  CHECK(op_norm(s) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("op_norm is submultiplicative on a battery") {
  Rng rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(6);
    CMat a = random_matrix(rng, d, d), b = random_matrix(rng, d, d);
    CHECK(op_norm(a * b) <= op_norm(a) * op_norm(b) + 1e-9);
  }
}

TEST_CASE("op_norm agrees with a singular-value oracle") {
  Rng rng(45);
  for (int rep = 0; rep < 30; ++rep) {
    Eigen::Index r = 2 + (Eigen::Index)rng.below(8);
    Eigen::Index c = 2 + (Eigen::Index)rng.below(8);
    CMat m = random_matrix(rng, r, c);
    Eigen::JacobiSVD<CMat> svd(m);
    double want = svd.singularValues()(0);
    CHECK(op_norm(m, 1e-11) == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("direct_sum, complement and subspace angle") {
  Rng rng(47);
  CMat a = random_matrix(rng, 2, 2), b = random_matrix(rng, 3, 3);
  CMat s = direct_sum(a, b);
  CHECK(s.rows() == 5);
  CHECK((s.topLeftCorner(2, 2) - a).norm() == 0.0);
  CHECK(s.bottomLeftCorner(3, 2).norm() == 0.0);

  CMat w = random_unitary(rng, 6);
  CMat basis = w.leftCols(2);
  CMat comp = complement_basis(basis, 6);
  CHECK(comp.cols() == 4);
  CHECK((basis.adjoint() * comp).norm() <= 1e-9);

  CHECK(subspace_angle(basis, basis) <= 1e-9);
  CHECK(subspace_angle(basis, w.leftCols(2)) <= 1e-9);
  CHECK(subspace_angle(basis, w.rightCols(2)) >= 0.999);
}

TEST_CASE("unit_phase_turns: exact quarter turns and reduction") {
  CHECK(unit_phase_turns(0.0) == cd(1, 0));
  CHECK(unit_phase_turns(0.5) == cd(-1, 0));
  CHECK(unit_phase_turns(-0.5) == cd(-1, 0));
  CHECK(unit_phase_turns(0.25) == cd(0, 1));
  CHECK(unit_phase_turns(1e12 + 0.5) == cd(-1, 0));
  CHECK(std::abs(unit_phase_turns(1.0 / 3.0) - std::polar(1.0, 2.0 * M_PI / 3.0)) <= 1e-15);
}
