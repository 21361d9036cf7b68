#include "awstab/selftest.hpp"

#include <chrono>
#include <cstdio>
#include <cmath>
#include <sstream>

#include "awstab/diskflow.hpp"
#include "awstab/ergodic.hpp"
#include "awstab/numkit.hpp"
#include "awstab/operators.hpp"
#include "awstab/orbitlab.hpp"
#include "awstab/polyseq.hpp"
#include "awstab/rng.hpp"
#include "awstab/splitting.hpp"

namespace awstab::selftest {

using operators::Angle;
using operators::HVec;
using operators::Operator;
using operators::SupportVec;
using polyseq::IntPoly;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED " << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

CMat planted(Rng& rng, Eigen::Index du, Eigen::Index dk, double knorm, CMat* w_out) {
  CMat u = CMat::Zero(du, du);
  for (Eigen::Index i = 0; i < du; ++i)
    u(i, i) = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
  CMat k = random_contraction(rng, dk, knorm * rng.uniform(0.5, 1.0));
  CMat w = random_unitary(rng, du + dk);
  if (w_out) *w_out = w;
  return w * numkit::direct_sum(u, k) * w.adjoint();
}

// 1. counterexample exactness along p(X) = 2X^2 - 4X + 3
Check criterion1() {
  Check c;
  const auto& p = diskflow::counterexample_poly();
  double worst = 0.0;
  for (std::int64_t n = 2; n <= 1000; ++n) {
    auto t = (double)p.eval(n);
    cd gamma = diskflow::gamma_point(t);
    worst = std::max(worst, std::abs(gamma + cd(1.0 - 1.0 / (2.0 * t), 0.0)));
  }
  c.require(worst <= 1e-12, "max |gamma(p(n)) + 1 - 1/(2p(n))| <= 1e-12");
  c.note("max deviation " + sci(worst));
  return c;
}

// 2. almost weak stability of the Koopman orbit at the curve start
Check criterion2() {
  Check c;
  auto s = diskflow::aws_series(diskflow::observable_f1(), diskflow::CurvePoint{0.0}, 100'000);
  double c3 = s.cesaro[999], c5 = s.cesaro[99'999];
  double density = s.selection.density_at(100'000);
  c.require(c5 <= 0.5 * c3, "C(1e5) <= 0.5 C(1e3)");
  c.require(c5 <= 0.15, "C(1e5) <= 0.15");
  c.require(density >= 0.95, "selection density >= 0.95");
  std::ostringstream os;
  os << "C(1e3)=" << c3 << " C(1e5)=" << c5 << " density=" << density;
  c.note(os.str());
  return c;
}

// 3. seam continuity of omega and gamma
Check criterion3() {
  Check c;
  const double delta = 1e-6;
  double worst = 0.0;
  for (double t : diskflow::seam_points(60))
    worst = std::max(worst,
                     std::abs(diskflow::gamma_point(t + delta) - diskflow::gamma_point(t - delta)));
  c.require(worst <= 20.0 * delta, "|gamma(t+d) - gamma(t-d)| <= 20 d at all seams, k <= 60");
  c.note("worst seam jump " + sci(worst));
  return c;
}

// 4. foguel split recovery on 50 planted contractions
Check criterion4() {
  Check c;
  Rng rng(0xF09E14ull);
  double worst_angle = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Index du = 1 + (Eigen::Index)rng.below(3);
    Eigen::Index dk = 1 + (Eigen::Index)rng.below(5);
    CMat w;
    CMat t = planted(rng, du, dk, 0.8, &w);
    auto res = splitting::foguel_split(t);
    c.require(res.part("H_u").dim() == du, "dim H_u exact (case " + std::to_string(rep) + ")");
    if (res.part("H_u").dim() == du) {
      double ang = numkit::subspace_angle(res.part("H_u").basis, w.leftCols(du));
      worst_angle = std::max(worst_angle, ang);
    }
  }
  c.require(worst_angle <= 1e-8, "principal subspace angle <= 1e-8");
  c.note("worst angle " + sci(worst_angle));
  return c;
}

// 5. jdlg split: exact reversible dimension, stable part decays
Check criterion5() {
  Check c;
  Rng rng(0x1D16ull);
  double worst_evidence = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Index du = 1 + (Eigen::Index)rng.below(3);
    Eigen::Index dk = 1 + (Eigen::Index)rng.below(5);
    CMat t = planted(rng, du, dk, 0.8, nullptr);
    auto res = splitting::jdlg_split(t, 1e-8, 2000, rng.next());
    c.require(res.part("H_r").dim() == du, "dim H_r exact (case " + std::to_string(rep) + ")");
    for (const auto& [desc, value] : res.evidence) worst_evidence = std::max(worst_evidence, value);
  }
  c.require(worst_evidence <= 0.05, "Cesaro |<g, T^n h>| at N=2000 <= 0.05 on sampled H_s");
  c.note("worst stable-part Cesaro " + sci(worst_evidence));
  return c;
}

// 6. Koopman-von Neumann extractor on the squares indicator plus converse
Check criterion6() {
  Check c;
  const std::int64_t n = 1'000'000;
  std::vector<double> y((size_t)n, 0.0);
  std::int64_t squares = 0;
  for (std::int64_t k = 1; k * k <= n; ++k) {
    y[(size_t)(k * k - 1)] = 1.0;
    ++squares;
  }
  auto sel = orbitlab::kvn_extract(y);
  c.require(squares == 1000, "square count sanity");
  c.require((std::int64_t)sel.indices.size() == n - squares, "selection excludes exactly the squares");
  double max_selected = 0.0;
  for (std::int64_t idx : sel.indices) max_selected = std::max(max_selected, y[(size_t)(idx - 1)]);
  c.require(max_selected == 0.0, "max selected value = 0");
  c.require(sel.density_at(n) >= 0.998, "density >= 0.998");

  Rng rng(0x6B76ull);
  for (int rep = 0; rep < 100; ++rep) {
    std::int64_t m = 100 + (std::int64_t)rng.below(3000);
    double bound = rng.uniform(0.2, 2.0);
    std::vector<double> z((size_t)m);
    for (auto& v : z) v = bound * rng.uniform();
    auto s = orbitlab::kvn_extract(z);
    auto cb = orbitlab::kvn_converse_check(z, s, bound);
    c.require(cb.cesaro_at_horizon <= cb.upper_bound + 1e-12,
              "converse bound (case " + std::to_string(rep) + ")");
  }
  c.note("density " + std::to_string(sel.density_at(n)));
  return c;
}

// 7. polynomial stability desk checks for the shift orbit and the difference
// polynomial machinery
Check criterion7() {
  Check c;
  Operator shift = Operator::bilateral_shift();
  HVec e0 = HVec(SupportVec::basis(0));
  auto rep = orbitlab::aws_verdict(shift, e0, {e0}, IntPoly{0, 0, 1}, 10'000);
  c.require(rep.per_functional[0].cesaro_at_horizon == 0.0, "Cesaro at N=1e4 exactly 0");
  c.require(rep.verdict, "verdict true");

  auto st = orbitlab::vdc_stats(
      [](std::int64_t n) { return HVec(SupportVec::basis(n * n)); }, 10'000, 50);
  for (int j = 1; j <= 50; ++j)
    c.require(st.gamma_tilde[(size_t)(j - 1)] == 0.0, "gamma_tilde_" + std::to_string(j) + " = 0");

  Rng rng(0xD1FFull);
  for (int rep2 = 0; rep2 < 200; ++rep2) {
    int deg = 1 + (int)rng.below(4);
    std::vector<std::int64_t> coeffs((size_t)deg + 1);
    for (auto& v : coeffs) v = (std::int64_t)rng.below(41) - 20;
    if (coeffs.back() == 0) coeffs.back() = 1 + (std::int64_t)rng.below(5);
    IntPoly p(coeffs);
    std::int64_t n0 = (std::int64_t)rng.below(30);
    std::int64_t nn = 1 + (std::int64_t)rng.below(30);
    IntPoly d = p.difference(n0, nn);
    c.require(d.degree() == p.degree() - 1, "difference degree drop");
    bool values_ok = true;
    for (std::int64_t j = 1; j <= 100; ++j)
      values_ok = values_ok && d.at(j) == p.at(n0 + j + nn) - p.at(n0 + j);
    c.require(values_ok, "difference value identity");
  }
  return c;
}

// 8. entangled and multiple averages agree entrywise
Check criterion8() {
  Check c;
  Rng rng(0xE26Dull);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(3);
    ergodic::MatrixAlgebra sys =
        (rep % 3 == 0) ? ergodic::MatrixAlgebra::diagonal([&] {
          std::vector<Angle> angs;
          for (Eigen::Index j = 0; j < d; ++j)
            angs.push_back(Angle::fraction((std::int64_t)rng.below(11),
                                           1 + (std::int64_t)rng.below(12)));
          return angs;
        }())
                       : ergodic::MatrixAlgebra::dense_unitary(random_unitary(rng, d));
    int k = 1 + (int)rng.below(3);
    int r = 1 + (int)std::min<std::uint64_t>(rng.below(2), (std::uint64_t)k - 1);
    ergodic::AverageRequest rq;
    rq.k = k;
    rq.r = r;
    rq.alpha.resize((size_t)k);
    for (int l = 0; l < r; ++l) rq.alpha[(size_t)l] = l + 1;
    for (int l = r; l < k; ++l) rq.alpha[(size_t)l] = 1 + (int)rng.below((std::uint64_t)r);
    for (int m = 0; m < r; ++m)
      rq.polys.emplace_back(std::vector<std::int64_t>{(std::int64_t)rng.below(5),
                                                      (std::int64_t)rng.below(4),
                                                      1 + (std::int64_t)rng.below(2)});
    std::vector<CMat> as;
    for (int l = 0; l < k; ++l) as.push_back(random_contraction(rng, d, rng.uniform(0.2, 1.0)));
    std::int64_t horizon = 2 + (std::int64_t)rng.below(49);
    auto eq = ergodic::equivalence_check(sys, as, rq, horizon);
    worst = std::max(worst, eq.max_discrepancy);
  }
  c.require(worst <= 1e-12, "max entrywise discrepancy <= 1e-12 over 100 cases");
  c.note("worst discrepancy " + sci(worst));
  return c;
}

// 9. Weyl oracle convergence for the cube-roots-of-unity diagonal
Check criterion9() {
  Check c;
  auto sys = ergodic::MatrixAlgebra::diagonal(
      {Angle::fraction(0, 1), Angle::fraction(1, 3), Angle::fraction(2, 3)});
  std::vector<CMat> as(2, CMat::Ones(3, 3));
  ergodic::AverageRequest rq;
  rq.k = 2;
  rq.r = 1;
  rq.alpha = {1, 1};
  rq.polys = {IntPoly{0, 0, 1}};
  CMat oracle = ergodic::weyl_oracle(sys.angles(), as, rq);

  double e1 = numkit::op_norm(ergodic::entangled_average(sys, as, rq, 300) - oracle, 1e-9);
  double e2 = numkit::op_norm(ergodic::entangled_average(sys, as, rq, 3000) - oracle, 1e-9);
  // at horizons that are exact period multiples the average telescopes onto
  // the oracle, so either the stated 5x decay holds or both errors sit at the
  // machine-exactness floor
  bool decayed = e2 <= e1 / 5.0 || std::max(e1, e2) <= 1e-13;
  c.require(decayed, "error at N*q=3000 down 5x from N*q=300 (or both at exactness floor)");
  c.require(e2 <= 1e-2, "final error <= 1e-2");

  cd zeta3 = std::polar(1.0, 2.0 * M_PI / 3.0);
  cd mean = ergodic::root_phase_mean(Angle::fraction(1, 3), IntPoly{0, 0, 1});
  c.require(std::abs(mean - (cd(1.0, 0.0) + 2.0 * zeta3) / 3.0) <= 1e-14,
            "one-dim oracle value (1 + 2 zeta_3)/3");

  // corroborating decay at off-period horizons where the C/N remainder shows
  double f1 = numkit::op_norm(ergodic::entangled_average(sys, as, rq, 100) - oracle, 1e-9);
  double f2 = numkit::op_norm(ergodic::entangled_average(sys, as, rq, 1000) - oracle, 1e-9);
  c.require(f2 <= f1 / 5.0 && f2 <= 1e-2, "off-period horizons decay 5x");

  std::ostringstream os;
  os << "e(300)=" << e1 << " e(3000)=" << e2 << " e(100)=" << f1 << " e(1000)=" << f2;
  c.note(os.str());
  return c;
}

// 10. linear-algebra substrate battery
Check criterion10() {
  Check c;
  Rng rng(0x5AB5ull);
  double worst_resid = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(15);
    CMat m;
    switch (rep % 4) {
      case 0: m = random_matrix(rng, d, d); break;
      case 1: m = random_unitary(rng, d); break;
      case 2: m = random_contraction(rng, d, rng.uniform(0.2, 1.0)); break;
      default: m = planted(rng, std::max<Eigen::Index>(1, d / 3), d - std::max<Eigen::Index>(1, d / 3), 0.8, nullptr);
    }
    try {
      auto pairs = numkit::eigen_decompose(m, 1e-8);
      double mn = std::max(m.norm(), 1e-300);
      for (const auto& p : pairs)
        worst_resid = std::max(worst_resid, (m * p.vector - p.value * p.vector).norm() / mn);
    } catch (const std::exception& e) {
      c.require(false, std::string("eigen battery case ") + std::to_string(rep) + ": " + e.what());
    }
  }
  c.require(worst_resid <= 1e-8, "eigen residuals <= 1e-8 over 200 matrices");

  double worst_pow = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    CMat m = random_contraction(rng, 4, 0.97);
    CMat fast = numkit::mat_power(m, 13);
    CMat slow = CMat::Identity(4, 4);
    for (int i = 0; i < 13; ++i) slow = slow * m;
    worst_pow = std::max(worst_pow, (fast - slow).cwiseAbs().maxCoeff());
  }
  c.require(worst_pow <= 1e-10, "mat_power vs sequential oracle <= 1e-10");

  double worst_adj = 0.0;
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::Index d = 2 + (Eigen::Index)rng.below(7);
    CMat m = random_contraction(rng, d, 1.0);
    Operator op = Operator::dense(m);
    CVec h = random_unit_vector(rng, d), g = random_unit_vector(rng, d);
    for (std::uint64_t n : {1ull, 7ull, 23ull}) {
      cd lhs = operators::inner(op.power_apply(n, HVec(h)), HVec(g));
      cd rhs = operators::inner(HVec(h), op.adjoint().power_apply(n, HVec(g)));
      worst_adj = std::max(worst_adj, std::abs(lhs - rhs));
    }
  }
  c.require(worst_adj <= 1e-10, "adjoint duality <= 1e-10");

  std::ostringstream os;
  os << "worst eigen residual " << worst_resid << ", worst power gap " << worst_pow
     << ", worst duality gap " << worst_adj;
  c.note(os.str());
  return c;
}

}  // namespace

std::vector<CriterionResult> run_all() {
  struct Entry {
    int id;
    const char* name;
    Check (*fn)();
  };
  const Entry entries[] = {
      {1, "counterexample exactness along 2X^2-4X+3", criterion1},
      {2, "almost weak stability of the Koopman orbit", criterion2},
      {3, "seam continuity of omega and gamma", criterion3},
      {4, "foguel split recovery", criterion4},
      {5, "jdlg split and stable-part decay", criterion5},
      {6, "Koopman-von Neumann extractor", criterion6},
      {7, "polynomial stability desk checks", criterion7},
      {8, "entangled/multiple average identity", criterion8},
      {9, "Weyl oracle convergence", criterion9},
      {10, "linear-algebra substrate", criterion10},
  };
  std::vector<CriterionResult> out;
  for (const auto& e : entries) {
    auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    r.id = e.id;
    r.name = e.name;
    try {
      Check c = e.fn();
      r.pass = c.pass;
      r.detail = c.detail.str();
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

bool all_passed(const std::vector<CriterionResult>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.name;
  if (!r.detail.empty()) os << " [" << r.detail << "]";
  os << " (" << (int)(r.seconds * 1000.0) << " ms)";
  return os.str();
}

}  // namespace awstab::selftest
