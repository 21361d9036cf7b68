#include "awstab/operators.hpp"

#include <algorithm>
#include <numeric>

namespace awstab::operators {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

std::int64_t checked_index_add(std::int64_t k, std::int64_t n) { return checked_add(k, n); }

}  // namespace

Angle Angle::fraction(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("Angle::fraction: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = gcd64(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {(double)num / (double)den, std::make_pair(num, den)};
}

cd Angle::phase_power(std::uint64_t n, bool conj) const {
  if (exact) {
    auto [num, den] = *exact;
    auto r = (std::int64_t)(n % (std::uint64_t)den);
    std::int64_t res = mulmod_i64(num, r, den);
    cd p = unit_phase_turns((double)res / (double)den);
    return conj ? std::conj(p) : p;
  }
  cd p = unit_phase_turns(value * (double)n);
  return conj ? std::conj(p) : p;
}

cd inner(const SupportVec& a, const SupportVec& b) {
  cd s(0.0, 0.0);
  auto ia = a.coeff.begin();
  auto ib = b.coeff.begin();
  while (ia != a.coeff.end() && ib != b.coeff.end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else {
      s += std::conj(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

cd inner(const HVec& a, const HVec& b) {
  if (a.index() != b.index()) throw DimensionError("inner: mixed vector models");
  if (std::holds_alternative<CVec>(a)) return inner(std::get<CVec>(a), std::get<CVec>(b));
  return inner(std::get<SupportVec>(a), std::get<SupportVec>(b));
}

double norm(const HVec& v) {
  if (std::holds_alternative<CVec>(v)) return std::get<CVec>(v).norm();
  return std::get<SupportVec>(v).norm();
}

Operator Operator::dense(CMat m) {
  if (m.rows() != m.cols()) throw DimensionError("Operator::dense: matrix must be square");
  Operator op;
  op.kind_ = Kind::dense;
  op.mat_ = std::move(m);
  return op;
}

Operator Operator::diag_unitary(std::vector<Angle> angles) {
  if (angles.empty()) throw ValidationError("Operator::diag_unitary: empty angle list");
  Operator op;
  op.kind_ = Kind::diag_unitary;
  op.angles_ = std::move(angles);
  return op;
}

Operator Operator::unilateral_shift() {
  Operator op;
  op.kind_ = Kind::unilateral_shift;
  return op;
}

Operator Operator::bilateral_shift() {
  Operator op;
  op.kind_ = Kind::bilateral_shift;
  return op;
}

Operator Operator::direct_sum(std::vector<Operator> blocks) {
  if (blocks.empty()) throw ValidationError("Operator::direct_sum: empty block list");
  for (const auto& b : blocks)
    if (!b.dim()) throw ValidationError("Operator::direct_sum: blocks must be finite-dimensional");
  Operator op;
  op.kind_ = Kind::direct_sum;
  op.blocks_ = std::move(blocks);
  return op;
}

std::optional<Eigen::Index> Operator::dim() const {
  switch (kind_) {
    case Kind::dense: return mat_.rows();
    case Kind::diag_unitary: return (Eigen::Index)angles_.size();
    case Kind::direct_sum: {
      Eigen::Index d = 0;
      for (const auto& b : blocks_) d += *b.dim();
      return d;
    }
    default: return std::nullopt;
  }
}

Operator Operator::adjoint() const {
  Operator op = *this;
  op.adjointed_ = !adjointed_;
  return op;
}

const CMat& Operator::dense_matrix() const {
  if (kind_ != Kind::dense) throw ValidationError("dense_matrix: operator is not dense");
  return mat_;
}

const std::vector<Angle>& Operator::angles() const {
  if (kind_ != Kind::diag_unitary) throw ValidationError("angles: operator is not a diagonal unitary");
  return angles_;
}

const std::vector<Operator>& Operator::blocks() const {
  if (kind_ != Kind::direct_sum) throw ValidationError("blocks: operator is not a direct sum");
  return blocks_;
}

Operator Operator::with_power_budget(std::uint64_t budget) const {
  Operator op = *this;
  op.power_budget_ = budget;
  return op;
}

HVec Operator::power_apply(std::uint64_t n, const HVec& v) const {
  switch (kind_) {
    case Kind::dense: {
      if (!std::holds_alternative<CVec>(v))
        throw DimensionError("power_apply: dense operator expects a dense vector");
      const CVec& x = std::get<CVec>(v);
      if (x.size() != mat_.rows()) throw DimensionError("power_apply: dimension mismatch");
      if (n == 0) return x;
      auto d = (std::uint64_t)mat_.rows();
      std::uint64_t bits = 64 - (std::uint64_t)__builtin_clzll(n);
      if (d * d * d * bits > power_budget_)
        throw BudgetError("power_apply: dense power exceeds configured budget");
      CMat base = adjointed_ ? CMat(mat_.adjoint()) : mat_;
      CVec acc = x;
      while (true) {
        if (n & 1u) acc = base * acc;
        n >>= 1;
        if (n == 0) break;
        base = base * base;
      }
      return acc;
    }
    case Kind::diag_unitary: {
      if (!std::holds_alternative<CVec>(v))
        throw DimensionError("power_apply: diagonal unitary expects a dense vector");
      CVec x = std::get<CVec>(v);
      if ((size_t)x.size() != angles_.size())
        throw DimensionError("power_apply: dimension mismatch");
      for (Eigen::Index j = 0; j < x.size(); ++j)
        x(j) *= angles_[(size_t)j].phase_power(n, adjointed_);
      return x;
    }
    case Kind::bilateral_shift: {
      if (!std::holds_alternative<SupportVec>(v))
        throw DimensionError("power_apply: shift expects a finitely supported vector");
      const auto& x = std::get<SupportVec>(v);
      if (n > (std::uint64_t)INT64_MAX) throw OverflowError("power_apply: exponent too large");
      auto step = adjointed_ ? -(std::int64_t)n : (std::int64_t)n;
      SupportVec out;
      for (const auto& [k, c] : x.coeff) out.coeff[checked_index_add(k, step)] = c;
      return out;
    }
    case Kind::unilateral_shift: {
      if (!std::holds_alternative<SupportVec>(v))
        throw DimensionError("power_apply: shift expects a finitely supported vector");
      const auto& x = std::get<SupportVec>(v);
      if (n > (std::uint64_t)INT64_MAX) throw OverflowError("power_apply: exponent too large");
      SupportVec out;
      for (const auto& [k, c] : x.coeff) {
        if (k < 0) throw DimensionError("power_apply: unilateral shift needs indices >= 0");
        if (!adjointed_) {
          out.coeff[checked_index_add(k, (std::int64_t)n)] = c;
        } else if (k >= (std::int64_t)n) {
          out.coeff[k - (std::int64_t)n] = c;  // components below zero are annihilated
        }
      }
      return out;
    }
    case Kind::direct_sum: {
      if (!std::holds_alternative<CVec>(v))
        throw DimensionError("power_apply: direct sum expects a dense vector");
      const CVec& x = std::get<CVec>(v);
      if (x.size() != *dim()) throw DimensionError("power_apply: dimension mismatch");
      CVec out(x.size());
      Eigen::Index off = 0;
      for (const auto& b : blocks_) {
        Eigen::Index bd = *b.dim();
        Operator blk = adjointed_ ? b.adjoint() : b;
        out.segment(off, bd) = std::get<CVec>(blk.power_apply(n, HVec(CVec(x.segment(off, bd)))));
        off += bd;
      }
      return out;
    }
  }
  throw ValidationError("power_apply: unknown operator kind");
}

bool Operator::is_contraction(double tol) const {
  switch (kind_) {
    case Kind::dense: return numkit::op_norm(mat_, std::min(tol, 1e-9)) <= 1.0 + tol;
    case Kind::diag_unitary:
    case Kind::unilateral_shift:
    case Kind::bilateral_shift: return true;
    case Kind::direct_sum:
      return std::all_of(blocks_.begin(), blocks_.end(),
                         [&](const Operator& b) { return b.is_contraction(tol); });
  }
  return false;
}

std::vector<cd> orbit_inner(const Operator& op, const HVec& h, const HVec& g,
                            std::span<const std::uint64_t> exponents) {
  for (size_t i = 0; i + 1 < exponents.size(); ++i)
    if (exponents[i] > exponents[i + 1])
      throw ValidationError("orbit_inner: exponents must be sorted ascending");

  std::vector<cd> out;
  out.reserve(exponents.size());

  if (op.kind() == Operator::Kind::dense && std::holds_alternative<CVec>(h)) {
    CMat base = op.is_adjointed() ? CMat(op.dense_matrix().adjoint()) : op.dense_matrix();
    DensePowerEngine engine(base);
    const CVec& gd = std::get<CVec>(g);
    CVec cur = std::get<CVec>(h);
    std::uint64_t at = 0;
    for (std::uint64_t e : exponents) {
      cur = engine.apply(e - at, std::move(cur));
      at = e;
      out.push_back(gd.dot(cur));
    }
    return out;
  }

  HVec cur = h;
  std::uint64_t at = 0;
  for (std::uint64_t e : exponents) {
    if (e != at || out.empty()) cur = op.power_apply(e - at, cur);
    at = e;
    out.push_back(inner(g, cur));
  }
  return out;
}

CMat to_dense(const Operator& op) {
  auto d = op.dim();
  if (!d) throw ValidationError("to_dense: operator is countable-dimensional");
  CMat m(*d, *d);
  for (Eigen::Index j = 0; j < *d; ++j)
    m.col(j) = std::get<CVec>(op.apply(HVec(CVec(CVec::Unit(*d, j)))));
  return m;
}

CVec DensePowerEngine::apply(std::uint64_t n, CVec v) {
  size_t bit = 0;
  while (n > 0) {
    while (bit >= squares_.size()) {
      const CMat& last = squares_.back();
      squares_.push_back(last * last);
    }
    if (n & 1u) v = squares_[bit] * v;
    n >>= 1;
    ++bit;
  }
  return v;
}

}  // namespace awstab::operators
