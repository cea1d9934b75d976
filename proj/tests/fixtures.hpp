#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "brownkit/measures.hpp"

namespace fixtures {

using brownkit::PositiveMeasure;
using brownkit::SymmetricMeasure;

struct Named {
  std::string name;
  SymmetricMeasure mu;
};

// Measures used by the property suites.
inline std::vector<Named> stored_measures() {
  using brownkit::symmetrize;
  std::vector<Named> out;
  out.push_back({"bernoulli(1)", brownkit::bernoulli(1.0)});
  out.push_back({"semicircle(1)", brownkit::semicircle(1.0)});
  out.push_back({"semicircle(2.5)", brownkit::semicircle(2.5)});
  out.push_back({"cauchy(1)", brownkit::symmetric_cauchy(1.0)});
  out.push_back({"cauchy-power(2)", symmetrize(PositiveMeasure::cauchy_power_modulus(2))});
  out.push_back({"three-atoms", symmetrize(PositiveMeasure::atomic({{0.5, 0.3}, {1.0, 0.4}, {2.0, 0.3}}))});
  out.push_back({"uniform[0,2]", symmetrize(PositiveMeasure::from_parts({}, {{{0.0, 2.0}, {0.5, 0.5}}}))});
  out.push_back({"tent+atom", symmetrize(PositiveMeasure::from_parts(
                                  {{2.0, 0.5}}, {{{0.5, 1.0, 1.5}, {0.0, 1.0, 0.0}}}))});
  out.push_back({"atom-at-zero", symmetrize(PositiveMeasure::atomic({{0.0, 0.3}, {1.0, 0.7}}))});
  return out;
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// Semicircle of variance eps, integrated with the substitution u = 2 sqrt(eps) sin(th).
inline double semicircle_expect(double eps, const std::function<double(double)>& g, int n = 20000) {
  const double r = 2 * std::sqrt(eps);
  return (2 / M_PI) *
         simpson([&](double th) { return g(r * std::sin(th)) * std::cos(th) * std::cos(th); }, -M_PI / 2,
                 M_PI / 2, n);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace fixtures
