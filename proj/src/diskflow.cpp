#include "awstab/diskflow.hpp"

#include <cmath>

namespace awstab::diskflow {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
// flow times must stay exactly representable as integers inside the k-window
// search; beyond this the parametrization would silently lose whole turns
constexpr double kMaxTime = 9.0e15;

struct AngleParts {
  double lift;     // unreduced omega(t)
  double reduced;  // residual with even multiples of pi removed exactly
};

AngleParts angle_parts(double t) {
  if (!std::isfinite(t)) throw ValidationError("angle: non-finite time");
  if (t > kMaxTime) throw ValidationError("angle: flow time beyond supported range");

  if (t < 3.0) {
    // -t pi; e^{-i t pi} depends on t mod 2 only, and fmod is exact
    double lift = -t * kPi;
    double reduced = -std::fmod(t, 2.0) * kPi;
    return {lift, reduced};
  }
  if (t < 4.0) {
    double rho = kPi / (t - 2.0);  // -4 pi + pi/(t-2)
    return {-4.0 * kPi + rho, rho};
  }

  // locate the k >= 2 window 2k^2 - 3k + 2 <= t <= 2k^2 + k + 1
  auto guess = (std::int64_t)std::llround(std::sqrt(t / 2.0));
  for (std::int64_t k = std::max<std::int64_t>(2, guess - 2); k <= guess + 2; ++k) {
    double lo = (double)(2 * k * k - 3 * k + 2);
    double hi = (double)(2 * k * k + k + 1);
    if (t < lo || t > hi) continue;
    double dk = (double)k;
    // the three k-branches in the printed order; the first match wins
    if ((double)(2 * k * k - k + 2) <= t && t <= (double)(2 * k * k + 1)) {
      double rho = -kPi / ((double)(2 * k * k + 2) - t);
      return {-2.0 * dk * kPi + rho, rho};
    }
    if ((double)(2 * k * k) <= t) {  // t <= 2k^2 + k + 1 already holds
      double rho = kPi / (t - (double)(2 * k * k));
      return {-(2.0 * dk + 2.0) * kPi + rho, rho};
    }
    double rho = ((double)(2 * k * k - 2 * k + 2) - t) / (dk * dk) * kPi;
    return {-2.0 * dk * kPi + rho, rho};
  }
  throw NumericalError("angle: no branch window located");  // windows tile [4, inf)
}

}  // namespace

double radius(double t) {
  if (t >= 1.0) return 1.0 - 1.0 / (2.0 * t);
  return std::exp(t - 1.0) / 2.0;
}

double angle(double t) { return angle_parts(t).lift; }
double angle_reduced(double t) { return angle_parts(t).reduced; }

cd gamma_point(double t) { return radius(t) * std::polar(1.0, angle_parts(t).reduced); }

cd circle_embed(double s) {
  if (s >= 0.0) return std::polar(1.0, kPi / (s + 1.0));
  return std::polar(1.0, kPi / (s - 1.0));
}

FlowPoint flow(const FlowPoint& x, double t) {
  if (std::holds_alternative<FixedPoint>(x)) return x;
  if (const auto* c = std::get_if<CirclePoint>(&x)) return CirclePoint{c->s + t};
  return CurvePoint{std::get<CurvePoint>(x).s + t};
}

cd embed(const FlowPoint& x) {
  if (std::holds_alternative<FixedPoint>(x)) return cd(1.0, 0.0);
  if (const auto* c = std::get_if<CirclePoint>(&x)) return circle_embed(c->s);
  return gamma_point(std::get<CurvePoint>(x).s);
}

const Observable& observable_f1() {
  static const Observable f{"f1", [](cd z) { return std::abs(z - cd(1.0, 0.0)) / 2.0; }};
  return f;
}

const Observable& observable_f2() {
  static const Observable f{"f2", [](cd z) { return (1.0 - z.real()) / 2.0; }};
  return f;
}

const Observable* find_observable(const std::string& name) {
  if (name == "f1") return &observable_f1();
  if (name == "f2") return &observable_f2();
  return nullptr;
}

double koopman_eval(const Observable& f, const FlowPoint& x, double t) {
  return f.f(embed(flow(x, t)));
}

const polyseq::IntPoly& counterexample_poly() {
  static const polyseq::IntPoly p{3, -4, 2};
  return p;
}

std::vector<CounterexampleRow> counterexample_series(const Observable& f, std::int64_t n_max) {
  if (n_max < 2) throw ValidationError("counterexample_series: need n_max >= 2");
  std::vector<CounterexampleRow> rows;
  rows.reserve((size_t)(n_max - 1));
  for (std::int64_t n = 2; n <= n_max; ++n) {
    std::int64_t t = counterexample_poly().eval(n);
    if ((double)t > kMaxTime) throw OverflowError("counterexample_series: time overflow");
    cd g = gamma_point((double)t);
    rows.push_back({n, t, g, std::abs(g + cd(1.0, 0.0)), f.f(g)});
  }
  return rows;
}

AwsSeries aws_series(const Observable& f, const FlowPoint& x, std::int64_t n_max) {
  if (n_max < 1) throw ValidationError("aws_series: need n_max >= 1");
  if (std::abs(f.f(cd(1.0, 0.0))) > 1e-14)
    throw ValidationError("aws_series: observable must vanish at the fixed point");
  AwsSeries out;
  out.y.resize((size_t)n_max);
  for (std::int64_t n = 1; n <= n_max; ++n)
    out.y[(size_t)(n - 1)] = std::abs(koopman_eval(f, x, (double)n));
  out.cesaro = orbitlab::cesaro(out.y);
  out.selection = orbitlab::kvn_extract(out.y);
  return out;
}

std::vector<double> seam_points(int k_max) {
  std::vector<double> seams{1.0, 3.0, 4.0};
  for (std::int64_t k = 2; k <= k_max; ++k) {
    seams.push_back((double)(2 * k * k - k + 2));
    seams.push_back((double)(2 * k * k + 1));
    seams.push_back((double)(2 * k * k + k + 1));
  }
  return seams;
}

}  // namespace awstab::diskflow
