#include "laws.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "brownkit/errors.hpp"

namespace brownkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double ModulusLaw::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  if (q <= mass_at_zero()) return 0.0;
  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (cdf(hi) < q) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 2000) throw SolverFailure("quantile bracket did not close", lo, hi, grow);
  }
  for (int i = 0; i < 200 && hi - lo > 4e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= q) hi = mid;
    else lo = mid;
  }
  return hi;
}

namespace detail {

// ---- shifted real measure ----

Kernels ShiftedRealLaw::kernels(double s) const {
  const double sigma = std::hypot(b_, s);
  const auto k = nu_.shifted_kernels(a_, sigma);
  const double b2 = b_ * b_;
  return {k.d, k.e, k.n + b2 * k.d, k.m + b2 * k.e};
}

double ShiftedRealLaw::log_moment(double s) const { return nu_.shifted_log(a_, std::hypot(b_, s)); }

double ShiftedRealLaw::second_moment() const { return nu_.shifted_second_moment(a_) + b_ * b_; }

double ShiftedRealLaw::inverse_second_moment() const { return nu_.shifted_inverse_square(a_, b_); }

double ShiftedRealLaw::mass_at_zero() const { return b_ == 0.0 ? nu_.mass_at(a_) : 0.0; }

double ShiftedRealLaw::cdf(double u) const {
  if (u < std::abs(b_)) return 0.0;
  const double w = std::sqrt((u - b_) * (u + b_));
  return std::min(1.0, nu_.mass_in(a_ - w, a_ + w));
}

// ---- quarter circle: modulus of a circular element ----

Kernels QuarterCircleLaw::kernels(double s) const {
  const double R = std::sqrt(s * s + 4 * eps_);
  const double Rs = R + s;
  return {2.0 / (s * Rs), 1.0 / (R * s * s * s), 4 * eps_ / (Rs * Rs), 4 * eps_ / (s * R * Rs * Rs)};
}

double QuarterCircleLaw::log_moment(double s) const {
  // E log(s^2+u^2) = 2 Phi(s) - 1 - 2 log 2 with
  // Phi(v) = [v sqrt(v^2+4e) - v^2 + 4e log(v + sqrt(v^2+4e))] / (4e).
  const double R = std::sqrt(s * s + 4 * eps_);
  const double head = s * 4 * eps_ / (R + s);  // v sqrt(v^2+4e) - v^2
  const double phi = head / (4 * eps_) + std::log(s + R);
  return 2 * phi - 1 - 2 * std::numbers::ln2;
}

double QuarterCircleLaw::inverse_second_moment() const { return kInf; }

double QuarterCircleLaw::cdf(double u) const {
  if (u <= 0) return 0.0;
  const double x = std::min(u / std::sqrt(eps_), 2.0);
  return x * std::sqrt(4 - x * x) / (2 * std::numbers::pi) + 2 * std::asin(x / 2) / std::numbers::pi;
}

// ---- circular Cauchy modulus ----

Kernels CauchyModulusLaw::kernels(double s) const {
  const double a = a_, sa = s + a;
  return {1.0 / (s * sa), (2 * s + a) / (2 * s * s * s * sa * sa), a / sa, a / (2 * s * sa * sa)};
}

double CauchyModulusLaw::log_moment(double s) const { return 2 * std::log(s + a_); }
double CauchyModulusLaw::second_moment() const { return kInf; }
double CauchyModulusLaw::inverse_second_moment() const { return kInf; }

double CauchyModulusLaw::cdf(double u) const {
  return u <= 0 ? 0.0 : 2 * std::atan(u / a_) / std::numbers::pi;
}

double CauchyModulusLaw::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  if (q == 1.0) return kInf;
  return a_ * std::tan(std::numbers::pi * q / 2);
}

// ---- circular Cauchy powers ----

CauchyPowerLaw::CauchyPowerLaw(int n) : n_(n), q_(double(n - 1) / double(n + 1)) {
  if (n < 1) throw DomainError("Cauchy power must be >= 1");
}

Kernels CauchyPowerLaw::kernels(double s) const {
  const double q = q_, w = std::pow(s, q), sw = s + w;
  return {1.0 / (s * sw), (2 * s + (1 + q) * w) / (2 * s * s * s * sw * sw), w / sw,
          w * (1 - q) / (2 * s * sw * sw)};
}

double CauchyPowerLaw::log_moment(double s) const {
  const double r = 2.0 / (n_ + 1);
  if (s == 0.0) return -kInf;
  return 2 * std::log(s) + (2 / r) * std::log1p(std::pow(s, -r));
}

double CauchyPowerLaw::second_moment() const { return kInf; }
double CauchyPowerLaw::inverse_second_moment() const { return kInf; }

double CauchyPowerLaw::density(double u) const {
  if (u <= 0) return 0.0;
  const double c = std::cos(std::numbers::pi * q_ / 2), sn = std::sin(std::numbers::pi * q_ / 2);
  const double w = std::pow(u, q_);
  const double re = w * c, im = u + w * sn;
  return 2 * re / (std::numbers::pi * (re * re + im * im));
}

// With x = t^k, k = 1/(1-q), the density becomes a shifted Cauchy kernel in t,
// so the distribution function is an arctangent.
double CauchyPowerLaw::cdf(double u) const {
  if (u <= 0) return 0.0;
  const double c = std::cos(std::numbers::pi * q_ / 2), sn = std::sin(std::numbers::pi * q_ / 2);
  const double k = 1.0 / (1.0 - q_);
  const double t = std::pow(u, 1.0 - q_);
  return std::min(1.0, (2 * k / std::numbers::pi) * (std::atan((t + sn) / c) - std::numbers::pi * q_ / 2));
}

double CauchyPowerLaw::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level outside [0,1]");
  if (p == 1.0) return kInf;
  const double c = std::cos(std::numbers::pi * q_ / 2), sn = std::sin(std::numbers::pi * q_ / 2);
  const double k = 1.0 / (1.0 - q_);
  const double t = c * std::tan(std::numbers::pi * p / (2 * k) + std::numbers::pi * q_ / 2) - sn;
  return std::pow(std::max(t, 0.0), 1.0 / (1.0 - q_));
}

}  // namespace detail
}  // namespace brownkit
