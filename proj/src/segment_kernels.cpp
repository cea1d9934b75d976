#include "segment_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

namespace brownkit::detail {

namespace {

using Rule = boost::math::quadrature::gauss<double, 20>;

// Calls f(v, rho(v), weight) for every node of the 20-point rule on [v0, v1].
template <class F>
void for_each_node(double v0, double v1, double y0, double y1, F&& f) {
  const double mid = 0.5 * (v0 + v1), half = 0.5 * (v1 - v0);
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (double sgn : {-1.0, 1.0}) {
      const double xi = sgn * xs[i];
      const double v = mid + half * xi;
      const double rho = y0 + (y1 - y0) * 0.5 * (xi + 1.0);
      f(v, rho, ws[i] * half);
    }
  }
}

// Distance from the segment to the pole pair +-i sigma.
double pole_distance(double v0, double v1, double sigma) {
  double vmin = 0.0;
  if (v0 > 0) vmin = v0;
  else if (v1 < 0) vmin = -v1;
  return std::hypot(vmin, sigma);
}

bool far_from_pole(double v0, double v1, double sigma) {
  return pole_distance(v0, v1, sigma) >= 0.5 * (v1 - v0);
}

// x log x with the 0 limit.
double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

}  // namespace

SegmentKernels segment_kernels(double v0, double v1, double y0, double y1, double sigma) {
  SegmentKernels k;
  if (v1 <= v0 || (y0 == 0.0 && y1 == 0.0)) return k;

  if (far_from_pole(v0, v1, sigma)) {
    const double s2 = sigma * sigma;
    for_each_node(v0, v1, y0, y1, [&](double v, double rho, double w) {
      const double q = s2 + v * v;
      const double wr = w * rho / q;
      k.d += wr;
      k.e += wr / q;
      k.n += wr * v * v;
      k.m += wr * v * v / q;
      k.xd += wr * v;
      k.xe += wr * v / q;
    });
    return k;
  }

  const double s = sigma, s2 = s * s;
  const double L = v1 - v0;
  const double beta = (y1 - y0) / L;
  const double alpha = y0 - beta * v0;
  const double q0 = s2 + v0 * v0, q1 = s2 + v1 * v1;

  // Differences of the antiderivatives, arranged to avoid subtracting
  // nearly equal numbers.
  const double dat = std::atan2(s * L, s2 + v0 * v1);           // atan(v/s)
  const double dlg = std::log1p(L * (v1 + v0) / q0);             // log q
  const double dinv_q = -L * (v1 + v0) / (q0 * q1);              // 1/q
  const double dv_q = L * (s2 - v0 * v1) / (q0 * q1);            // v/q
  const double dv2 = L * (v1 + v0);                              // v^2

  const double A0 = dat / s;
  const double A1 = 0.5 * dlg;
  const double A2 = L - s * dat;
  const double A3 = 0.5 * dv2 - 0.5 * s2 * dlg;
  const double B0 = dv_q / (2 * s2) + dat / (2 * s2 * s);
  const double B1 = -0.5 * dinv_q;
  const double B2 = dat / (2 * s) - 0.5 * dv_q;
  const double B3 = 0.5 * dlg + 0.5 * s2 * dinv_q;

  k.d = alpha * A0 + beta * A1;
  k.e = alpha * B0 + beta * B1;
  k.n = alpha * A2 + beta * A3;
  k.m = alpha * B2 + beta * B3;
  k.xd = alpha * A1 + beta * A2;
  k.xe = alpha * B1 + beta * B2;
  return k;
}

double segment_log(double v0, double v1, double y0, double y1, double sigma) {
  if (v1 <= v0 || (y0 == 0.0 && y1 == 0.0)) return 0.0;
  const double s2 = sigma * sigma;
  if (far_from_pole(v0, v1, sigma)) {
    double acc = 0.0;
    for_each_node(v0, v1, y0, y1,
                  [&](double v, double rho, double w) { acc += w * rho * std::log(s2 + v * v); });
    return acc;
  }
  const double beta = (y1 - y0) / (v1 - v0);
  const double alpha = y0 - beta * v0;
  auto L0 = [&](double v) {
    const double q = s2 + v * v;
    double r = (q > 0 ? v * std::log(q) : 0.0) - 2 * v;
    if (sigma > 0) r += 2 * sigma * std::atan(v / sigma);
    return r;
  };
  auto L1 = [&](double v) {
    const double q = s2 + v * v;
    return 0.5 * (xlogx(q) - q);
  };
  return alpha * (L0(v1) - L0(v0)) + beta * (L1(v1) - L1(v0));
}

double segment_inverse_square(double v0, double v1, double y0, double y1) {
  if (v1 <= v0 || (y0 == 0.0 && y1 == 0.0)) return 0.0;
  if (v0 <= 0.0 && v1 >= 0.0) return std::numeric_limits<double>::infinity();
  if (far_from_pole(v0, v1, 0.0)) {
    double acc = 0.0;
    for_each_node(v0, v1, y0, y1, [&](double v, double rho, double w) { acc += w * rho / (v * v); });
    return acc;
  }
  const double beta = (y1 - y0) / (v1 - v0);
  const double alpha = y0 - beta * v0;
  return alpha * (v1 - v0) / (v0 * v1) + beta * std::log(v1 / v0);
}

double segment_mass(double v0, double v1, double y0, double y1) {
  return 0.5 * (y0 + y1) * (v1 - v0);
}

double segment_second_moment(double v0, double v1, double y0, double y1) {
  double acc = 0.0;
  for_each_node(v0, v1, y0, y1, [&](double v, double rho, double w) { acc += w * rho * v * v; });
  return acc;
}

double segment_partial_mass(double v0, double v1, double y0, double y1, double x) {
  x = std::clamp(x, v0, v1);
  const double yx = y0 + (y1 - y0) * (x - v0) / (v1 - v0);
  return 0.5 * (y0 + yx) * (x - v0);
}

}  // namespace brownkit::detail
