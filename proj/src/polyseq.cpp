#include "awstab/polyseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "awstab/numkit.hpp"

namespace awstab::polyseq {

namespace {

constexpr std::int64_t kDirectScanCap = 1'000'000;

using i128 = __int128;

i128 checked_add128(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int128 overflow in polynomial scan");
  return r;
}

i128 checked_mul128(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int128 overflow in polynomial scan");
  return r;
}

// Exact wide Horner; used only for membership scans where intermediate values
// may exceed 64 bits even though callers never consume them.
i128 horner128(const std::vector<std::int64_t>& c, std::int64_t x) {
  i128 acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
    acc = checked_add128(checked_mul128(acc, (i128)x), (i128)*it);
  return acc;
}

// 1 + max |c_i| / |c_lead| over i < deg; every real root has magnitude below it.
double cauchy_bound(const std::vector<std::int64_t>& c) {
  double lead = std::abs((double)c.back());
  double worst = 0.0;
  for (size_t i = 0; i + 1 < c.size(); ++i)
    worst = std::max(worst, std::abs((double)c[i]));
  return 1.0 + worst / lead;
}

// Approximate complex roots via the companion matrix (Schur diagonal); only
// used to localize candidate integers, every decision re-checks exactly.
std::vector<cd> approx_roots(const std::vector<std::int64_t>& c) {
  const int d = (int)c.size() - 1;
  CMat comp = CMat::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = cd(1.0, 0.0);
  for (int i = 0; i < d; ++i) comp(i, d - 1) = cd(-(double)c[(size_t)i] / (double)c.back(), 0.0);
  auto s = numkit::schur(comp);
  std::vector<cd> roots;
  for (int i = 0; i < d; ++i) roots.push_back(s.t(i, i));
  return roots;
}

// Integers in [lo, hi] worth testing for a sign condition on p: near every
// root plus both interval ends. Any integer where the polynomial dips below
// zero is adjacent to a real root, so this set witnesses all violations.
std::vector<std::int64_t> candidate_integers(const std::vector<std::int64_t>& c,
                                             std::int64_t lo, std::int64_t hi) {
  std::set<std::int64_t> cand;
  auto push = [&](double v) {
    auto base = (std::int64_t)std::floor(v);
    for (std::int64_t off = -2; off <= 2; ++off) {
      std::int64_t n = base + off;
      if (n >= lo && n <= hi) cand.insert(n);
    }
  };
  for (cd r : approx_roots(c)) push(r.real());
  for (std::int64_t off = 0; off <= 2; ++off) {
    if (lo + off <= hi) cand.insert(lo + off);
    if (hi - off >= lo) cand.insert(hi - off);
  }
  return {cand.begin(), cand.end()};
}

}  // namespace

IntPoly::IntPoly(std::vector<std::int64_t> coeffs) : c_(std::move(coeffs)) {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

std::int64_t IntPoly::at(std::int64_t x) const {
  std::int64_t acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = checked_add(checked_mul(acc, x), *it);
  return acc;
}

std::int64_t IntPoly::eval(std::int64_t n) const {
  if (n < 1) throw ValidationError("IntPoly::eval: argument must be >= 1");
  std::int64_t v = at(n);
  if (v < 0) throw NegativeValueError("IntPoly::eval: negative value at n=" + std::to_string(n));
  return v;
}

bool IntPoly::in_class_P() const {
  if (degree() <= 0) return c_.empty() || c_[0] >= 0;
  if (leading() < 0) return false;
  auto bound = (std::int64_t)std::ceil(cauchy_bound(c_));
  if (bound <= kDirectScanCap) {
    for (std::int64_t n = 1; n <= bound; ++n)
      if (horner128(c_, n) < 0) return false;
    return true;
  }
  for (std::int64_t n : candidate_integers(c_, 1, bound))
    if (horner128(c_, n) < 0) return false;
  return true;
}

bool IntPoly::in_class_P0() const {
  if (is_zero()) return true;
  if (c_[0] != 0) return false;
  if (degree() <= 0) return true;
  return in_class_P();  // p(0) = 0 already holds; positivity from n = 1 on
}

IntPoly IntPoly::shifted(std::int64_t shift) const {
  if (c_.empty()) return IntPoly{};
  const int d = degree();
  std::vector<std::int64_t> out((size_t)d + 1, 0);
  for (int i = 0; i <= d; ++i) {
    // contribution of c_[i] * (X + shift)^i, expanded binomially
    std::int64_t binom = 1;  // C(i, j), walked from j = i down to 0
    std::vector<std::int64_t> pw((size_t)i + 1, 1);
    for (int e = 1; e <= i; ++e) pw[(size_t)e] = checked_mul(pw[(size_t)e - 1], shift);
    for (int j = i; j >= 0; --j) {
      std::int64_t term = checked_mul(checked_mul(c_[(size_t)i], binom), pw[(size_t)(i - j)]);
      out[(size_t)j] = checked_add(out[(size_t)j], term);
      if (j > 0) binom = checked_mul(binom, j) / (i - j + 1);  // exact division
    }
  }
  return IntPoly(std::move(out));
}

IntPoly IntPoly::difference(std::int64_t n0, std::int64_t n) const {
  if (degree() < 1) throw ValidationError("IntPoly::difference: polynomial must be non-constant");
  IntPoly hi = shifted(checked_add(n0, n));
  IntPoly lo = shifted(n0);
  std::vector<std::int64_t> out(std::max(hi.c_.size(), lo.c_.size()), 0);
  for (size_t i = 0; i < out.size(); ++i) {
    std::int64_t a = i < hi.c_.size() ? hi.c_[i] : 0;
    std::int64_t b = i < lo.c_.size() ? lo.c_[i] : 0;
    out[i] = checked_sub(a, b);
  }
  return IntPoly(std::move(out));
}

std::int64_t IntPoly::monotone_threshold() const {
  if (degree() < 1) throw ValidationError("monotone_threshold: polynomial must be non-constant");
  if (!in_class_P()) throw ValidationError("monotone_threshold: polynomial not in the class");
  IntPoly q = difference(0, 1);  // q(m) = p(m+1) - p(m)
  if (q.degree() < 1) {
    // linear p: constant positive difference
    return 1;
  }
  auto bound = (std::int64_t)std::ceil(cauchy_bound(q.c_));
  if (bound <= kDirectScanCap) {
    for (std::int64_t m = bound; m >= 1; --m)
      if (horner128(q.c_, m) <= 0) return m + 1;
    return 1;
  }
  std::int64_t worst = 0;
  for (std::int64_t m : candidate_integers(q.c_, 1, bound))
    if (horner128(q.c_, m) <= 0) worst = std::max(worst, m);
  return worst + 1;
}

std::string IntPoly::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    std::int64_t v = c_[(size_t)i];
    if (v == 0) continue;
    if (!first) os << (v > 0 ? " + " : " - ");
    else if (v < 0) os << "-";
    std::int64_t a = std::abs(v);
    if (i == 0 || a != 1) os << a;
    if (i >= 1) os << "X";
    if (i >= 2) os << "^" << i;
    first = false;
  }
  return os.str();
}

double affine_density(const IntPoly& p) {
  if (p.degree() != 1 || p.leading() <= 0)
    throw ValidationError("affine_density: expects aX + b with a > 0");
  return 1.0 / (double)p.leading();
}

}  // namespace awstab::polyseq
