#pragma once

#include <cmath>
#include <cstdint>

#include "awstab/numkit.hpp"

namespace awstab {

// xoshiro256** seeded through splitmix64; self-contained so that seeded runs
// are reproducible across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    auto splitmix = [&x]() {
      x += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      return z ^ (z >> 31);
    };
    for (auto& s : s_) s = splitmix();
  }

  std::uint64_t next() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  double uniform() { return (double)(next() >> 11) * 0x1.0p-53; }  // [0,1)

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cd gaussian_c() { return cd(gaussian(), gaussian()) / std::sqrt(2.0); }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline CMat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian_c();
  return m;
}

inline CVec random_unit_vector(Rng& rng, Eigen::Index d) {
  CVec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.gaussian_c();
  double n = v.norm();
  return (n == 0.0) ? CVec::Unit(d, 0) : CVec(v / n);
}

/// Haar-like unitary: QR of a Gaussian matrix with the R-diagonal phases fixed.
inline CMat random_unitary(Rng& rng, Eigen::Index d) {
  CMat g = random_matrix(rng, d, d);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    cd rj = r(j, j);
    cd phase = (std::abs(rj) > 0.0) ? rj / std::abs(rj) : cd(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

/// Random matrix rescaled to operator norm exactly norm_target.
inline CMat random_contraction(Rng& rng, Eigen::Index d, double norm_target) {
  CMat g = random_matrix(rng, d, d);
  double nrm = numkit::op_norm(g, 1e-12);
  if (nrm == 0.0) return CMat::Zero(d, d);
  return g * (norm_target / nrm);
}

}  // namespace awstab
