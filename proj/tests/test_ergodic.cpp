#include <doctest.h>

#include <cmath>

#include "awstab/ergodic.hpp"
#include "awstab/orbitlab.hpp"
#include "awstab/rng.hpp"

using namespace awstab;
using namespace awstab::ergodic;
using operators::Angle;
using polyseq::IntPoly;

namespace {

const cd kZeta3 = std::polar(1.0, 2.0 * M_PI / 3.0);

AverageRequest req_single(IntPoly p, int k = 1) {
  AverageRequest rq;
  rq.k = k;
  rq.r = 1;
  rq.alpha.assign((size_t)k, 1);
  rq.polys = {std::move(p)};
  return rq;
}

MatrixAlgebra zeta3_system() {
  return MatrixAlgebra::diagonal(
      {Angle::fraction(0, 1), Angle::fraction(1, 3), Angle::fraction(2, 3)});
}

}  // namespace

TEST_CASE("request validation") {
  AverageRequest rq;
  rq.k = 2;
  rq.r = 2;
  rq.alpha = {1, 2};
  rq.polys = {IntPoly{0, 1}, IntPoly{0, 0, 1}};
  CHECK_NOTHROW(rq.validate());

  rq.alpha = {1, 1};  // not surjective onto {1,2}
  CHECK_THROWS_AS(rq.validate(), ValidationError);

  rq.alpha = {1, 2};
  rq.polys = {IntPoly{0, 1}, IntPoly{-5, 1}};  // X - 5 leaves the class
  CHECK_THROWS_AS(rq.validate(), ValidationError);
}

TEST_CASE("s_exponents: fixed cases") {
  {
    auto rq = req_single(IntPoly{0, 1});
    std::vector<std::int64_t> ns{5};
    CHECK(s_exponents(rq, ns) == std::vector<std::int64_t>{5});
  }
  {
    auto rq = req_single(IntPoly{0, 0, 1}, 2);  // r=1, k=2, alpha=(1,1), X^2
    std::vector<std::int64_t> ns{3};
    CHECK(s_exponents(rq, ns) == std::vector<std::int64_t>{9, 18});
  }
  {
    AverageRequest rq;
    rq.k = 2;
    rq.r = 2;
    rq.alpha = {1, 2};
    rq.polys = {IntPoly{0, 1}, IntPoly{0, 0, 1}};
    std::vector<std::int64_t> ns{2, 3};
    CHECK(s_exponents(rq, ns) == std::vector<std::int64_t>{2, 11});
  }
}

TEST_CASE("multiple average: identity operands and trivial automorphism") {
  auto sys = zeta3_system();
  std::vector<CMat> ids(2, CMat::Identity(3, 3));
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 1}};
  for (std::int64_t n : {1, 7, 20}) {
    CMat s = multiple_average(sys, ids, rq, n);
    CHECK((s - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
  }

  Rng rng(301);
  auto trivial = MatrixAlgebra::dense_unitary(CMat::Identity(2, 2));
  std::vector<CMat> as{random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
  CMat want = as[0] * as[1];
  for (std::int64_t n : {1, 5, 13}) {
    CMat s = multiple_average(trivial, as, rq, n);
    CHECK((s - want).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("multiple average: alternating sign phase kills the off-diagonal") {
  auto sys = MatrixAlgebra::diagonal({Angle::fraction(0, 1), Angle::fraction(1, 2)});
  CMat a = CMat::Zero(2, 2);
  a(0, 1) = cd(1.0, 0.0);
  auto rq = req_single(IntPoly{0, 1});
  CMat s = multiple_average(sys, {a}, rq, 100);  // even horizon
  CHECK(s.cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("entangled equals multiple term by term") {
  Rng rng(302);
  for (int rep = 0; rep < 30; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(3);
    MatrixAlgebra sys = (rep % 2 == 0)
                            ? MatrixAlgebra::dense_unitary(random_unitary(rng, d))
                            : MatrixAlgebra::diagonal([&] {
                                std::vector<Angle> angs;
                                for (Eigen::Index j = 0; j < d; ++j)
                                  angs.push_back(Angle::fraction((std::int64_t)rng.below(7),
                                                                 1 + (std::int64_t)rng.below(9)));
                                return angs;
                              }());
    int k = 1 + (int)rng.below(3);
    int r = 1 + (int)std::min<std::uint64_t>(rng.below(2), (std::uint64_t)(k - 1));
    AverageRequest rq;
    rq.k = k;
    rq.r = r;
    rq.alpha.resize((size_t)k);
    for (int l = 0; l < r; ++l) rq.alpha[(size_t)l] = l + 1;  // force surjectivity
    for (int l = r; l < k; ++l) rq.alpha[(size_t)l] = 1 + (int)rng.below((std::uint64_t)r);
    for (int m = 0; m < r; ++m) {
      std::vector<std::int64_t> c{(std::int64_t)rng.below(4), (std::int64_t)rng.below(3),
                                  1 + (std::int64_t)rng.below(2)};
      rq.polys.emplace_back(c);
    }
    std::vector<CMat> as;
    for (int l = 0; l < k; ++l) as.push_back(random_contraction(rng, d, rng.uniform(0.2, 1.0)));
    std::int64_t horizon = 5 + (std::int64_t)rng.below(25);
    auto rep_eq = equivalence_check(sys, as, rq, horizon);
    CHECK(rep_eq.max_discrepancy <= 1e-12);
  }
}

TEST_CASE("entangled average: k=1 identity operand") {
  auto sys = zeta3_system();
  auto rq = req_single(IntPoly{0, 1});
  CMat s = entangled_average(sys, {CMat::Identity(3, 3)}, rq, 50);
  CHECK((s - CMat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("root phase mean: trivial, alternating, cubic residues") {
  CHECK(std::abs(root_phase_mean(Angle::fraction(0, 1), IntPoly{0, 1}) - cd(1, 0)) <= 1e-15);
  CHECK(std::abs(root_phase_mean(Angle::fraction(1, 2), IntPoly{0, 1})) <= 1e-16);
  cd want = (cd(1.0, 0.0) + 2.0 * kZeta3) / 3.0;  // residues of n^2 mod 3: 1, 1, 0
  CHECK(std::abs(root_phase_mean(Angle::fraction(1, 3), IntPoly{0, 0, 1}) - want) <= 1e-14);
}

TEST_CASE("weyl oracle: zero angles give the plain product") {
  Rng rng(303);
  std::vector<Angle> zeros{Angle::fraction(0, 1), Angle::fraction(0, 1)};
  std::vector<CMat> as{random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 1}};
  CMat oracle = weyl_oracle(zeros, as, rq);
  CHECK((oracle - as[0] * as[1]).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("weyl oracle rejects irrational phases and deep r") {
  std::vector<Angle> bad{Angle::real(0.1234)};
  CHECK_THROWS_AS((void)weyl_oracle(bad, {CMat::Identity(1, 1)}, req_single(IntPoly{0, 1})),
                  ValidationError);
}

TEST_CASE("weyl oracle matches the empirical entangled limit") {
  auto sys = zeta3_system();
  std::vector<CMat> as(2, CMat::Ones(3, 3));
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 1}};
  CMat oracle = weyl_oracle(sys.angles(), as, rq);

  // at horizons that are exact multiples of the period the average telescopes
  // to the oracle, so only rounding noise remains
  CMat s300 = entangled_average(sys, as, rq, 300);
  CMat s3000 = entangled_average(sys, as, rq, 3000);
  CHECK(numkit::op_norm(s300 - oracle, 1e-9) <= 1e-13);
  CHECK(numkit::op_norm(s3000 - oracle, 1e-9) <= 1e-13);

  // at off-period horizons the partial period decays like C/N
  double e100 = numkit::op_norm(entangled_average(sys, as, rq, 100) - oracle, 1e-9);
  double e1000 = numkit::op_norm(entangled_average(sys, as, rq, 1000) - oracle, 1e-9);
  CHECK(e1000 <= e100 / 5.0);
  CHECK(e1000 <= 1e-2);
  double c_bound = 2.0 * 3.0 * 3.0 * 27.0;  // 2 prod|A_j| (path count)
  CHECK(e100 <= c_bound / 100.0);
  CHECK(e1000 <= c_bound / 1000.0);
}

TEST_CASE("weyl oracle at a second denominator (q = 5)") {
  auto sys = MatrixAlgebra::diagonal({Angle::fraction(1, 5), Angle::fraction(3, 5)});
  Rng rng(307);
  std::vector<CMat> as{random_contraction(rng, 2, 1.0), random_contraction(rng, 2, 1.0)};
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 1, 1}};  // X^2 + X
  CMat oracle = weyl_oracle(sys.angles(), as, rq);

  // period-multiple horizon telescopes onto the oracle
  CHECK(numkit::op_norm(entangled_average(sys, as, rq, 500) - oracle, 1e-9) <= 1e-13);
  // off-period horizons decay like C/N
  double e1 = numkit::op_norm(entangled_average(sys, as, rq, 101) - oracle, 1e-9);
  double e2 = numkit::op_norm(entangled_average(sys, as, rq, 1001) - oracle, 1e-9);
  CHECK(e2 <= e1 / 5.0 + 1e-14);
  double c_bound = 2.0 * numkit::op_norm(as[0], 1e-9) * numkit::op_norm(as[1], 1e-9) * 8.0;
  CHECK(e1 <= c_bound / 101.0);
}

TEST_CASE("weyl oracle with two free variables") {
  // r = 2: the average factorizes per path into a product of per-variable
  // period means, and telescopes exactly onto the oracle at multiples of the
  // common period
  auto sys = MatrixAlgebra::diagonal({Angle::fraction(1, 2), Angle::fraction(1, 3)});
  Rng rng(308);
  std::vector<CMat> as{random_contraction(rng, 2, 1.0), random_contraction(rng, 2, 1.0)};
  AverageRequest rq;
  rq.k = 2;
  rq.r = 2;
  rq.alpha = {1, 2};
  rq.polys = {IntPoly{0, 1}, IntPoly{0, 0, 1}};  // X and X^2, periods 6 and 6
  CMat oracle = weyl_oracle(sys.angles(), as, rq);

  CHECK(numkit::op_norm(entangled_average(sys, as, rq, 60) - oracle, 1e-9) <= 1e-13);
  // same residue mod 6 so the partial-period remainder constant matches
  double e1 = numkit::op_norm(entangled_average(sys, as, rq, 50) - oracle, 1e-9);
  double e2 = numkit::op_norm(entangled_average(sys, as, rq, 500) - oracle, 1e-9);
  CHECK(e2 <= e1 / 5.0 + 1e-13);
  // direct cross-check of the factorized limit for one entry family
  auto eq = equivalence_check(sys, as, rq, 60);
  CHECK(eq.max_discrepancy <= 1e-12);
}

TEST_CASE("exponent prefix sums overflow loudly") {
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 0, 0, 1'000'000'000}};  // 1e9 X^4
  std::vector<std::int64_t> ns{4000};
  CHECK_THROWS_AS((void)s_exponents(rq, ns), OverflowError);
}

TEST_CASE("d = 3 oracle case: both routes stay identified at every horizon") {
  auto sys = zeta3_system();
  std::vector<CMat> as(2, CMat::Ones(3, 3));
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 1}};
  for (std::int64_t n : {1, 2, 3, 10, 33, 100}) {
    auto eq = equivalence_check(sys, as, rq, n);
    CHECK(eq.max_discrepancy <= 1e-12);
  }
}

TEST_CASE("gns weak series: constants and oracle convergence rate") {
  auto sys = zeta3_system();
  AverageSeries series;
  series.grid = {1, 2, 3};
  series.values = std::vector<CMat>(3, CMat::Identity(3, 3));
  auto ones = gns_weak_series(sys, CMat::Identity(3, 3), series);
  for (cd v : ones) CHECK(std::abs(v - cd(1, 0)) <= 1e-15);
  auto zeros = gns_weak_series(sys, CMat::Zero(3, 3), series);
  for (cd v : zeros) CHECK(std::abs(v) == 0.0);

  std::vector<CMat> as(2, CMat::Ones(3, 3));
  AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 1}};
  auto s = average_series(sys, as, rq, {100, 200, 400, 1000});
  CMat oracle = weyl_oracle(sys.angles(), as, rq);
  CMat a0 = CMat::Identity(3, 3);
  auto pairing = gns_weak_series(sys, a0, s);
  cd limit = sys.phi(a0 * oracle);
  for (size_t i = 0; i < s.grid.size(); ++i) {
    double fitted_c = std::abs(pairing[i] - limit) * (double)s.grid[i];
    CHECK(fitted_c <= 60.0);  // |phi(a0 S_N) - phi(a0 oracle)| <= C / N
  }
}

TEST_CASE("system invariants: trace preservation and phi-norm isometry") {
  Rng rng(304);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(4);
    auto sys = MatrixAlgebra::dense_unitary(random_unitary(rng, d));
    CHECK(std::abs(sys.phi(CMat::Identity(d, d)) - cd(1, 0)) <= 1e-14);
    CMat a = random_matrix(rng, d, d);
    CHECK(sys.phi(a.adjoint() * a).real() >= -1e-12);
    CHECK(std::abs(sys.phi(sys.beta(a)) - sys.phi(a)) <= 1e-12);
    CHECK(std::abs(sys.phi_norm(sys.beta(a)) - sys.phi_norm(a)) <= 1e-12);
  }
}

TEST_CASE("averages stay bounded by the product of operand norms") {
  Rng rng(305);
  for (int rep = 0; rep < 8; ++rep) {
    auto sys = MatrixAlgebra::dense_unitary(random_unitary(rng, 3));
    std::vector<CMat> as{random_matrix(rng, 3, 3), random_matrix(rng, 3, 3)};
    AverageRequest rq;
    rq.k = 2;
    rq.r = 1;
    rq.alpha = {1, 1};
    rq.polys = {IntPoly{0, 2, 1}};
    double bound = numkit::op_norm(as[0], 1e-10) * numkit::op_norm(as[1], 1e-10);
    for (std::int64_t n : {3, 10, 40})
      CHECK(numkit::op_norm(entangled_average(sys, as, rq, n), 1e-9) <= bound + 1e-9);
  }
}

TEST_CASE("k=1 r=1 reduces to the Cesaro mean of conjugated iterates") {
  auto sys = zeta3_system();
  Rng rng(306);
  CMat a = random_matrix(rng, 3, 3);
  auto rq = req_single(IntPoly{1, 0, 2});  // 2X^2 + 1
  const std::int64_t horizon = 37;
  std::vector<cd> entry_series;
  for (std::int64_t n = 1; n <= horizon; ++n)
    entry_series.push_back(sys.beta_power(rq.polys[0].eval(n), a)(1, 2));
  auto running = orbitlab::cesaro(std::span<const cd>(entry_series));
  CMat avg = multiple_average(sys, {a}, rq, horizon);
  CHECK(std::abs(avg(1, 2) - running.back()) <= 1e-13);
}

TEST_CASE("budget and dimension guards") {
  auto sys = zeta3_system();
  std::vector<CMat> as{CMat::Identity(3, 3)};
  auto rq = req_single(IntPoly{0, 1});
  CHECK_THROWS_AS((void)multiple_average(sys, as, rq, 1'000'000'000, 1000), BudgetError);
  std::vector<CMat> wrong{CMat::Identity(2, 2)};
  CHECK_THROWS_AS((void)multiple_average(sys, wrong, rq, 5), DimensionError);
}
