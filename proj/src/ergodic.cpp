#include "awstab/ergodic.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

namespace awstab::ergodic {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

// fixed binary-counter reduction tree; the grouping depends only on the
// number of terms added, so results are bitwise reproducible
struct PairwiseSum {
  std::vector<std::optional<CMat>> levels;

  void add(CMat x) {
    size_t i = 0;
    while (i < levels.size() && levels[i]) {
      x += *levels[i];
      levels[i].reset();
      ++i;
    }
    if (i == levels.size()) levels.emplace_back();
    levels[i] = std::move(x);
  }

  CMat total(Eigen::Index rows, Eigen::Index cols) const {
    CMat t = CMat::Zero(rows, cols);
    for (const auto& l : levels)
      if (l) t += *l;
    return t;
  }
};

// u-power lookup shared by one summation; exact diagonals bypass it entirely
struct UPowerCache {
  const MatrixAlgebra& sys;
  std::map<std::int64_t, CMat> powers;

  const CMat& get(std::int64_t e) {
    auto it = powers.find(e);
    if (it != powers.end()) return it->second;
    CMat p = sys.u_power(e);
    return powers.emplace(e, std::move(p)).first->second;
  }
};

void check_operand_list(const MatrixAlgebra& sys, const std::vector<CMat>& as, int k) {
  if ((int)as.size() != k) throw ValidationError("average: operand count must equal k");
  for (const auto& a : as)
    if (a.rows() != sys.dim() || a.cols() != sys.dim())
      throw DimensionError("average: operand dimension mismatch");
}

void check_budget(const MatrixAlgebra& sys, const AverageRequest& req, std::int64_t horizon,
                  std::uint64_t budget) {
  if (horizon < 1) throw ValidationError("average: horizon must be positive");
  if (req.r > 3) throw ValidationError("average: r > 3 is outside the compute envelope");
  double tuples = std::pow((double)horizon, (double)req.r);
  double cost = tuples * (double)req.k * (double)(sys.dim() * sys.dim() * sys.dim());
  if (cost > (double)budget) throw BudgetError("average: N^r k d^3 exceeds the compute budget");
}

// odometer over (n_1..n_r) in [1, horizon]^r, last variable fastest
bool advance_tuple(std::vector<std::int64_t>& ns, std::int64_t horizon) {
  for (size_t i = ns.size(); i-- > 0;) {
    if (ns[i] < horizon) {
      ++ns[i];
      for (size_t j = i + 1; j < ns.size(); ++j) ns[j] = 1;
      return true;
    }
  }
  return false;
}

}  // namespace

MatrixAlgebra MatrixAlgebra::dense_unitary(CMat u) {
  if (u.rows() != u.cols() || u.rows() == 0)
    throw DimensionError("MatrixAlgebra: unitary must be square");
  CMat defect = u.adjoint() * u - CMat::Identity(u.rows(), u.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("MatrixAlgebra: matrix is not unitary");
  MatrixAlgebra sys;
  sys.d_ = u.rows();
  sys.u_ = std::move(u);
  return sys;
}

MatrixAlgebra MatrixAlgebra::diagonal(std::vector<Angle> angles) {
  if (angles.empty()) throw ValidationError("MatrixAlgebra: empty angle list");
  MatrixAlgebra sys;
  sys.d_ = (Eigen::Index)angles.size();
  sys.u_ = CMat::Zero(sys.d_, sys.d_);
  for (Eigen::Index j = 0; j < sys.d_; ++j)
    sys.u_(j, j) = angles[(size_t)j].phase_power(1);
  sys.angles_ = std::move(angles);
  return sys;
}

cd MatrixAlgebra::phi(const CMat& a) const { return a.trace() / (double)d_; }

double MatrixAlgebra::phi_norm(const CMat& a) const {
  return std::sqrt(std::max(0.0, phi(a.adjoint() * a).real()));
}

CMat MatrixAlgebra::u_power(std::int64_t e) const {
  if (!angles_.empty()) {
    CMat p = CMat::Zero(d_, d_);
    bool conj = e < 0;
    auto mag = (std::uint64_t)(conj ? -e : e);
    for (Eigen::Index j = 0; j < d_; ++j)
      p(j, j) = angles_[(size_t)j].phase_power(mag, conj);
    return p;
  }
  if (e >= 0) return numkit::mat_power(u_, (std::uint64_t)e);
  return numkit::mat_power(u_, (std::uint64_t)(-e)).adjoint();
}

CMat MatrixAlgebra::beta_power(std::int64_t s, const CMat& a) const {
  CMat us = u_power(s);
  return us * a * us.adjoint();
}

void AverageRequest::validate() const {
  if (k < 1 || r < 1 || r > k) throw ValidationError("AverageRequest: need 1 <= r <= k");
  if ((int)alpha.size() != k) throw ValidationError("AverageRequest: alpha must have length k");
  std::vector<bool> hit((size_t)r, false);
  for (int a : alpha) {
    if (a < 1 || a > r) throw ValidationError("AverageRequest: alpha value out of range");
    hit[(size_t)(a - 1)] = true;
  }
  if (!std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }))
    throw ValidationError("AverageRequest: alpha must be surjective");
  if ((int)polys.size() != r) throw ValidationError("AverageRequest: need r polynomials");
  for (const auto& p : polys)
    if (!p.in_class_P())
      throw ValidationError("AverageRequest: polynomial not in the nonnegative class");
}

std::vector<std::int64_t> s_exponents(const AverageRequest& req, std::span<const std::int64_t> ns) {
  req.validate();
  if ((int)ns.size() != req.r) throw ValidationError("s_exponents: tuple size must equal r");
  for (std::int64_t n : ns)
    if (n < 1) throw ValidationError("s_exponents: variables start at 1");
  std::vector<std::int64_t> out((size_t)req.k);
  std::int64_t acc = 0;
  for (int l = 0; l < req.k; ++l) {
    int m = req.alpha[(size_t)l];
    acc = checked_add(acc, req.polys[(size_t)(m - 1)].eval(ns[(size_t)(m - 1)]));
    out[(size_t)l] = acc;
  }
  return out;
}

CMat multiple_average(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                      const AverageRequest& req, std::int64_t horizon, std::uint64_t budget) {
  req.validate();
  check_operand_list(sys, as, req.k);
  check_budget(sys, req, horizon, budget);

  UPowerCache cache{sys, {}};
  PairwiseSum sum;
  std::vector<std::int64_t> ns((size_t)req.r, 1);
  do {
    auto s = s_exponents(req, ns);
    CMat term = CMat::Identity(sys.dim(), sys.dim());
    for (int l = 0; l < req.k; ++l) {
      const CMat& us = cache.get(s[(size_t)l]);
      term = term * (us * as[(size_t)l] * us.adjoint());
    }
    sum.add(std::move(term));
  } while (advance_tuple(ns, horizon));
  return sum.total(sys.dim(), sys.dim()) / std::pow((double)horizon, (double)req.r);
}

CMat entangled_average(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                       const AverageRequest& req, std::int64_t horizon, std::uint64_t budget) {
  req.validate();
  check_operand_list(sys, as, req.k);
  check_budget(sys, req, horizon, budget);

  UPowerCache cache{sys, {}};
  PairwiseSum sum;
  std::vector<std::int64_t> ns((size_t)req.r, 1);
  do {
    CMat term = CMat::Identity(sys.dim(), sys.dim());
    std::int64_t sk = 0;
    for (int l = 0; l < req.k; ++l) {
      int m = req.alpha[(size_t)l];
      std::int64_t e = req.polys[(size_t)(m - 1)].eval(ns[(size_t)(m - 1)]);
      sk = checked_add(sk, e);
      term = term * cache.get(e) * as[(size_t)l];
    }
    term = term * cache.get(-sk);  // u^{-s_k} as a power of the adjoint
    sum.add(std::move(term));
  } while (advance_tuple(ns, horizon));
  return sum.total(sys.dim(), sys.dim()) / std::pow((double)horizon, (double)req.r);
}

cd root_phase_mean(const Angle& zeta, const polyseq::IntPoly& p) {
  if (!zeta.exact) throw ValidationError("root_phase_mean: angle must be an exact rational");
  auto [num, den] = *zeta.exact;
  cd acc(0.0, 0.0);
  for (std::int64_t n = 1; n <= den; ++n) {
    std::int64_t res = p.eval(n) % den;
    acc += unit_phase_turns((double)mulmod_i64(num, res, den) / (double)den);
  }
  return acc / (double)den;
}

CMat weyl_oracle(const std::vector<Angle>& angles, const std::vector<CMat>& as,
                 const AverageRequest& req) {
  req.validate();
  if (req.r > 2) throw ValidationError("weyl_oracle: r <= 2 required");
  const auto d = (Eigen::Index)angles.size();
  for (const auto& a : angles)
    if (!a.exact) throw ValidationError("weyl_oracle: all eigenphases must be roots of unity");
  for (const auto& a : as)
    if (a.rows() != d || a.cols() != d) throw DimensionError("weyl_oracle: operand dimension");

  // per-variable phase means memoized on the reduced fraction
  std::map<std::tuple<std::int64_t, std::int64_t, int>, cd> memo;
  auto mean_of = [&](std::int64_t num, std::int64_t den, int var) {
    std::int64_t g = gcd64(num, den);
    num /= g;
    den /= g;
    num %= den;
    if (num < 0) num += den;
    auto key = std::make_tuple(num, den, var);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    cd v = root_phase_mean(Angle::fraction(num, den), req.polys[(size_t)(var - 1)]);
    memo.emplace(key, v);
    return v;
  };

  // common denominator for exact fraction sums
  std::int64_t common = 1;
  for (const auto& a : angles) common = checked_mul(common / gcd64(common, a.exact->second),
                                                    a.exact->second);
  std::vector<std::int64_t> scaled((size_t)d);
  for (Eigen::Index j = 0; j < d; ++j)
    scaled[(size_t)j] = checked_mul(angles[(size_t)j].exact->first,
                                    common / angles[(size_t)j].exact->second);

  CMat oracle = CMat::Zero(d, d);
  std::vector<Eigen::Index> path((size_t)req.k + 1, 0);  // path[0]=row a, path[k]=col b
  while (true) {
    cd amp(1.0, 0.0);
    for (int l = 0; l < req.k; ++l) amp *= as[(size_t)l](path[(size_t)l], path[(size_t)l + 1]);
    if (amp != cd(0.0, 0.0)) {
      cd factor(1.0, 0.0);
      for (int m = 1; m <= req.r; ++m) {
        std::int64_t num = 0;  // sum over l with alpha(l)=m of theta_{i_{l-1}} - theta_b
        for (int l = 0; l < req.k; ++l)
          if (req.alpha[(size_t)l] == m)
            num = checked_add(num, checked_sub(scaled[(size_t)path[(size_t)l]],
                                               scaled[(size_t)path[(size_t)req.k]]));
        factor *= mean_of(num, common, m);
      }
      oracle(path[0], path[(size_t)req.k]) += amp * factor;
    }
    // advance the path odometer
    size_t i = path.size();
    while (i-- > 0) {
      if (path[i] + 1 < d) {
        ++path[i];
        std::fill(path.begin() + (std::ptrdiff_t)i + 1, path.end(), 0);
        break;
      }
      if (i == 0) return oracle;
    }
  }
}

EquivalenceReport equivalence_check(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                                    const AverageRequest& req, std::int64_t horizon,
                                    std::uint64_t budget) {
  EquivalenceReport rep;
  rep.via_beta = multiple_average(sys, as, req, horizon, budget);
  rep.via_u = entangled_average(sys, as, req, horizon, budget);
  rep.max_discrepancy = (rep.via_beta - rep.via_u).cwiseAbs().maxCoeff();
  std::int64_t half = std::max<std::int64_t>(1, horizon / 2);
  CMat beta_half = multiple_average(sys, as, req, half, budget);
  CMat u_half = entangled_average(sys, as, req, half, budget);
  rep.phi_cauchy_beta = sys.phi_norm(rep.via_beta - beta_half);
  rep.phi_cauchy_u = sys.phi_norm(rep.via_u - u_half);
  return rep;
}

AverageSeries average_series(const MatrixAlgebra& sys, const std::vector<CMat>& as,
                             const AverageRequest& req, std::vector<std::int64_t> grid,
                             std::uint64_t budget) {
  if (grid.empty()) throw ValidationError("average_series: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw ValidationError("average_series: grid must be ascending");
  AverageSeries out;
  out.grid = std::move(grid);
  for (std::int64_t n : out.grid) out.values.push_back(entangled_average(sys, as, req, n, budget));
  for (size_t i = 1; i < out.values.size(); ++i) {
    out.phi_deltas.push_back(sys.phi_norm(out.values[i] - out.values[i - 1]));
    out.norm_deltas.push_back(numkit::op_norm(out.values[i] - out.values[i - 1], 1e-9));
  }
  return out;
}

std::vector<cd> gns_weak_series(const MatrixAlgebra& sys, const CMat& a0, const AverageSeries& s) {
  std::vector<cd> out;
  out.reserve(s.values.size());
  for (const auto& v : s.values) out.push_back(sys.phi(a0 * v));
  return out;
}

}  // namespace awstab::ergodic
