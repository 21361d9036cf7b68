#include "awstab/orbitlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace awstab::orbitlab {

using operators::HVec;
using operators::inner;
using operators::Operator;

namespace {

constexpr int kMaxLevel = 50;

void validate_nonnegative(std::span<const double> y) {
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("series value not finite");
    if (v < 0.0) throw ValidationError("series value negative");
  }
}

}  // namespace

std::vector<double> cesaro(std::span<const double> y) {
  std::vector<double> out(y.size());
  double acc = 0.0;
  for (size_t n = 0; n < y.size(); ++n) {
    acc += y[n];
    out[n] = acc / (double)(n + 1);
  }
  return out;
}

std::vector<cd> cesaro(std::span<const cd> y) {
  std::vector<cd> out(y.size());
  cd acc(0.0, 0.0);
  for (size_t n = 0; n < y.size(); ++n) {
    acc += y[n];
    out[n] = acc / (double)(n + 1);
  }
  return out;
}

double Selection::density_at(std::int64_t n) const {
  if (n < 1 || n > horizon) throw ValidationError("density_at: position out of range");
  auto it = std::upper_bound(indices.begin(), indices.end(), n);
  return (double)(it - indices.begin()) / (double)n;
}

int Selection::level_at(std::int64_t n) const {
  int level = 0;
  for (const auto& [start, m] : blocks) {
    if (start > n) break;
    level = m;
  }
  return level;
}

bool Selection::contains(std::int64_t n) const {
  return std::binary_search(indices.begin(), indices.end(), n);
}

Selection kvn_extract(std::span<const double> y) {
  validate_nonnegative(y);
  Selection sel;
  const auto n_total = (std::int64_t)y.size();
  sel.horizon = n_total;
  if (n_total == 0) return sel;

  sel.blocks.push_back({1, 1});
  std::int64_t pos = 1;
  int level = 1;

  // ghat(t) = 2^L * |{n <= t : y_n >= 2^-L}| - t, exact in __int128. A
  // boundary b is admissible for level L iff max_{x >= b} ghat(x) <= ghat(b-1).
  std::vector<__int128> ghat((size_t)n_total + 1);
  std::vector<__int128> suffmax((size_t)n_total + 2);

  while (level < kMaxLevel) {
    const int next = level + 1;
    const double eps = std::ldexp(1.0, -next);
    // advancement slack one notch tighter than the selection threshold; the
    // looser 2^-next budget costs ~5% density on slowly mixing orbits
    const __int128 scale = (__int128)1 << (next + 1);
    ghat[0] = 0;
    std::int64_t bad = 0;
    for (std::int64_t t = 1; t <= n_total; ++t) {
      if (y[(size_t)(t - 1)] >= eps) ++bad;
      ghat[(size_t)t] = scale * (__int128)bad - (__int128)t;
    }
    suffmax[(size_t)n_total + 1] = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t t = n_total; t >= pos; --t)
      suffmax[(size_t)t] = std::max(ghat[(size_t)t], suffmax[(size_t)t + 1]);

    std::int64_t boundary = -1;
    for (std::int64_t b = pos; b <= n_total; ++b) {
      if (suffmax[(size_t)b] <= ghat[(size_t)(b - 1)]) {
        boundary = b;
        break;
      }
    }
    if (boundary < 0) break;
    sel.blocks.push_back({boundary, next});
    pos = boundary;
    level = next;
  }

  // materialize the selection: inside a block at level m keep y < 2^-m
  size_t blk = 0;
  double eps = 0.0;
  for (std::int64_t n = 1; n <= n_total; ++n) {
    while (blk < sel.blocks.size() && sel.blocks[blk].first <= n) {
      eps = std::ldexp(1.0, -sel.blocks[blk].second);
      ++blk;
    }
    if (y[(size_t)(n - 1)] < eps) sel.indices.push_back(n);
  }

  for (std::int64_t n = 1; n <= n_total; n = std::max(n + 1, n + n / 8))
    sel.density_profile.push_back({n, sel.density_at(n)});
  if (sel.density_profile.empty() || sel.density_profile.back().first != n_total)
    sel.density_profile.push_back({n_total, sel.density_at(n_total)});
  return sel;
}

Selection joint_kvn(const std::vector<std::vector<double>>& ys) {
  if (ys.empty()) throw ValidationError("joint_kvn: empty family");
  const size_t n = ys.front().size();
  for (const auto& y : ys)
    if (y.size() != n) throw ValidationError("joint_kvn: unequal horizons");
  std::vector<double> peak(n, 0.0);
  for (const auto& y : ys) {
    validate_nonnegative(y);
    for (size_t i = 0; i < n; ++i) peak[i] = std::max(peak[i], y[i]);
  }
  return kvn_extract(peak);
}

ConverseBound kvn_converse_check(std::span<const double> y, const Selection& sel, double bound) {
  validate_nonnegative(y);
  if ((std::int64_t)y.size() != sel.horizon)
    throw ValidationError("kvn_converse_check: horizon mismatch");
  for (double v : y)
    if (v > bound + 1e-12) throw ValidationError("kvn_converse_check: series exceeds bound");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= std::max<double>(1.0, (double)y.size());
  double worst_selected = 0.0;
  for (std::int64_t n : sel.indices)
    worst_selected = std::max(worst_selected, y[(size_t)(n - 1)]);
  double density = sel.horizon > 0 ? sel.density_at(sel.horizon) : 1.0;
  return {mean, (1.0 - density) * bound + worst_selected};
}

OrbitFn polynomial_orbit(const Operator& op, const HVec& h, const polyseq::IntPoly& p) {
  if (p.degree() < 1 || !p.in_class_P())
    throw ValidationError("polynomial_orbit: polynomial must be non-constant and in the class");
  struct State {
    std::int64_t last_n = -1;  // first call must take the fresh path
    std::int64_t last_exp = 0;
    HVec cur;
  };
  auto st = std::make_shared<State>();
  return [op, h, p, st](std::int64_t n) {
    std::int64_t e = p.eval(n);
    if (n == st->last_n + 1 && e >= st->last_exp) {
      st->cur = op.power_apply((std::uint64_t)(e - st->last_exp), st->cur);
    } else {
      st->cur = op.power_apply((std::uint64_t)e, h);
    }
    st->last_n = n;
    st->last_exp = e;
    return st->cur;
  };
}

VdcStats vdc_stats(const OrbitFn& orbit, std::int64_t horizon, int lag_max) {
  if (horizon < 2) throw ValidationError("vdc_stats: horizon too small");
  if (lag_max < 1 || lag_max >= horizon) throw ValidationError("vdc_stats: bad lag range");

  VdcStats st;
  st.horizon = horizon;
  st.lag_max = lag_max;
  std::vector<cd> acc((size_t)lag_max, cd(0.0, 0.0));
  std::vector<double> acc_abs((size_t)lag_max, 0.0);
  std::vector<HVec> ring((size_t)lag_max + 1);

  const std::int64_t half = horizon / 2, quarter = horizon / 4;
  auto snapshot = [&](std::int64_t at, std::vector<double>& g, std::vector<double>& gt) {
    g.resize((size_t)lag_max);
    gt.resize((size_t)lag_max);
    for (int j = 0; j < lag_max; ++j) {
      g[(size_t)j] = std::abs(acc[(size_t)j]) / (double)at;
      gt[(size_t)j] = acc_abs[(size_t)j] / (double)at;
    }
  };

  for (std::int64_t n = 1; n <= horizon; ++n) {
    HVec h = orbit(n);
    if (operators::norm(h) > 1.0 + 1e-9)
      throw ValidationError("vdc_stats: orbit violates the normalization |h_n| <= 1");
    ring[(size_t)(n % (lag_max + 1))] = std::move(h);
    const HVec& hn = ring[(size_t)(n % (lag_max + 1))];
    for (int j = 1; j <= lag_max && j < n; ++j) {
      const HVec& hprev = ring[(size_t)((n - j) % (lag_max + 1))];
      cd v = inner(hprev, hn);
      acc[(size_t)(j - 1)] += v;
      acc_abs[(size_t)(j - 1)] += std::abs(v);
    }
    if (n == quarter && quarter > 0) snapshot(quarter, st.gamma_quarter, st.gamma_tilde_quarter);
    if (n == half && half > 0) snapshot(half, st.gamma_half, st.gamma_tilde_half);
  }
  snapshot(horizon, st.gamma, st.gamma_tilde);
  return st;
}

VdcStats vdc_stats(const std::vector<HVec>& orbit, int lag_max) {
  return vdc_stats([&](std::int64_t n) { return orbit[(size_t)(n - 1)]; },
                   (std::int64_t)orbit.size(), lag_max);
}

AwsReport aws_verdict(const Operator& op, const HVec& h, const std::vector<HVec>& functionals,
                      const polyseq::IntPoly& p, std::int64_t horizon, double tau) {
  if (!op.is_contraction(1e-8)) throw ValidationError("aws_verdict: operator is not a contraction");
  if (p.degree() < 1 || !p.in_class_P())
    throw ValidationError("aws_verdict: polynomial must be non-constant and in the class");
  if (horizon < 1) throw ValidationError("aws_verdict: horizon must be positive");
  if (functionals.empty()) throw ValidationError("aws_verdict: no test functionals");

  AwsReport rep;
  rep.horizon = horizon;
  rep.tau = tau >= 0.0 ? tau : 10.0 / std::sqrt((double)horizon);

  // exponents may dip before the monotone threshold; evaluate in sorted order
  std::vector<std::uint64_t> exps((size_t)horizon);
  for (std::int64_t n = 1; n <= horizon; ++n)
    exps[(size_t)(n - 1)] = (std::uint64_t)p.eval(n);
  std::vector<std::int64_t> order((size_t)horizon);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::int64_t a, std::int64_t b) { return exps[(size_t)a] < exps[(size_t)b]; });
  std::vector<std::uint64_t> sorted((size_t)horizon);
  for (size_t i = 0; i < sorted.size(); ++i) sorted[i] = exps[(size_t)order[i]];

  std::vector<std::vector<double>> all_y;
  rep.verdict = true;
  for (const HVec& g : functionals) {
    auto vals = orbit_inner(op, h, g, sorted);
    FunctionalReport fr;
    fr.y.resize((size_t)horizon);
    for (size_t i = 0; i < vals.size(); ++i) fr.y[(size_t)order[i]] = std::abs(vals[i]);
    fr.cesaro_means = cesaro(fr.y);
    fr.cesaro_at_horizon = fr.cesaro_means.back();
    fr.selection = kvn_extract(fr.y);
    fr.below_threshold = fr.cesaro_at_horizon <= rep.tau;
    rep.verdict = rep.verdict && fr.below_threshold;
    all_y.push_back(fr.y);
    rep.per_functional.push_back(std::move(fr));
  }
  rep.joint = joint_kvn(all_y);
  return rep;
}

}  // namespace awstab::orbitlab
