#pragma once

#include "brownkit/measures.hpp"

namespace brownkit::detail {

// |u - (a + ib)| for u distributed by a real measure.  With a = b = 0 and nu
// on [0, inf) this is the plain empirical law.
class ShiftedRealLaw final : public ModulusLaw {
 public:
  ShiftedRealLaw(RealMeasure nu, double a, double b) : nu_(std::move(nu)), a_(a), b_(b) {}
  Kernels kernels(double s) const override;
  double log_moment(double s) const override;
  double second_moment() const override;
  double inverse_second_moment() const override;
  double mass_at_zero() const override;
  double cdf(double u) const override;

 private:
  RealMeasure nu_;
  double a_, b_;
};

class QuarterCircleLaw final : public ModulusLaw {
 public:
  explicit QuarterCircleLaw(double variance) : eps_(variance) {}
  Kernels kernels(double s) const override;
  double log_moment(double s) const override;
  double second_moment() const override { return eps_; }
  double inverse_second_moment() const override;
  double mass_at_zero() const override { return 0.0; }
  double cdf(double u) const override;

 private:
  double eps_;
};

class CauchyModulusLaw final : public ModulusLaw {
 public:
  explicit CauchyModulusLaw(double scale) : a_(scale) {}
  Kernels kernels(double s) const override;
  double log_moment(double s) const override;
  double second_moment() const override;
  double inverse_second_moment() const override;
  double mass_at_zero() const override { return 0.0; }
  double cdf(double u) const override;
  double quantile(double q) const override;

 private:
  double a_;
};

// h(s) = 1/(s + s^q), q = (n-1)/(n+1).  The density on (0, inf) is read off
// the boundary values of the continued Cauchy transform -i/(-ix + (-ix)^q).
class CauchyPowerLaw final : public ModulusLaw {
 public:
  explicit CauchyPowerLaw(int n);
  Kernels kernels(double s) const override;
  double log_moment(double s) const override;
  double second_moment() const override;
  double inverse_second_moment() const override;
  double mass_at_zero() const override { return 0.0; }
  double cdf(double u) const override;
  double quantile(double p) const override;
  double density(double u) const;

 private:
  int n_;
  double q_;
};

}  // namespace brownkit::detail
