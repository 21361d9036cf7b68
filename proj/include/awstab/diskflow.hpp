#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "awstab/numkit.hpp"
#include "awstab/orbitlab.hpp"

namespace awstab::diskflow {

/// Points of the compact invariant set S = Gamma (unit circle) together with
/// the spiral curve gamma(R), in flow-time coordinates. The flow advances by
/// exact parameter translation; all geometry happens at embedding time.
struct FixedPoint {};                 // the fixed point 1
struct CirclePoint { double s = 0; }; // homoclinic orbit of -1, time s
struct CurvePoint { double s = 0; };  // spiral curve, time s
using FlowPoint = std::variant<FixedPoint, CirclePoint, CurvePoint>;

FlowPoint flow(const FlowPoint& x, double t);

/// Curve modulus: 1 - 1/(2t) for t >= 1, e^{t-1}/2 for t <= 1 (both branches
/// meet at 1/2).
double radius(double t);

/// Curve phase as the unreduced real lift. For t >= 4 the unique window
/// 2k^2-3k+2 <= t <= 2k^2+k+1 with k >= 2 is located and the three k-branches
/// apply with list-order precedence; for t <= 3 and 3 <= t <= 4 the closing
/// branches apply. Continuous at every seam.
double angle(double t);

/// Phase with the even multiples of pi removed exactly, so that
/// e^{i angle(t)} = e^{i angle_reduced(t)} without large-argument loss.
double angle_reduced(double t);

/// gamma(t) = radius(t) e^{i angle(t)}, evaluated through the reduced phase.
cd gamma_point(double t);

/// Homoclinic circle parametrization: e^{i pi/(s+1)} for s >= 0 and
/// e^{i pi/(s-1)} for s <= 0; both give -1 at s = 0.
cd circle_embed(double s);

cd embed(const FlowPoint& x);

/// Continuous observable on S with f(1) = 0.
struct Observable {
  std::string name;
  std::function<double(cd)> f;
};

const Observable& observable_f1();  // |z - 1| / 2
const Observable& observable_f2();  // (1 - Re z) / 2
const Observable* find_observable(const std::string& name);

/// (T(t) f)(x) = f(phi_t(x)).
double koopman_eval(const Observable& f, const FlowPoint& x, double t);

/// The polynomial of the counterexample, 2X^2 - 4X + 3.
const polyseq::IntPoly& counterexample_poly();

struct CounterexampleRow {
  std::int64_t n = 0;
  std::int64_t t = 0;   // p(n)
  cd gamma;
  double deviation = 0; // |gamma(p(n)) + 1|, identically 1/(2 p(n))
  double f_value = 0;
};

/// Rows for n = 2..n_max along the polynomial time sequence.
std::vector<CounterexampleRow> counterexample_series(const Observable& f, std::int64_t n_max);

struct AwsSeries {
  std::vector<double> y;       // y_n = |f(phi_n(x))|, n = 1..n_max
  std::vector<double> cesaro;
  orbitlab::Selection selection;
};

/// Requires f(1) = 0.
AwsSeries aws_series(const Observable& f, const FlowPoint& x, std::int64_t n_max);

/// Seam points {1, 3, 4} and {2k^2-k+2, 2k^2+1, 2k^2+k+1} for 2 <= k <= k_max.
std::vector<double> seam_points(int k_max);

}  // namespace awstab::diskflow
