#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "brownkit/measures.hpp"

namespace brownkit {

using cplx = std::complex<double>;

struct NormalAtom {
  cplx z;
  double mass;
};

// x0: a selfadjoint spectral measure, a normal operator with finitely many
// eigenvalues, or an explicit matrix under the normalized trace.
class OperatorModel {
 public:
  enum class Kind { selfadjoint, normal, matrix };

  static OperatorModel zero();
  static OperatorModel selfadjoint(RealMeasure spectrum);
  static OperatorModel normal(std::vector<NormalAtom> atoms);
  static OperatorModel matrix(Eigen::MatrixXcd x);

  Kind kind() const;
  bool is_normal() const { return kind() != Kind::matrix; }
  const RealMeasure& spectrum() const;
  const std::vector<NormalAtom>& normal_atoms() const;
  const Eigen::MatrixXcd& matrix() const;

  // Points carrying eigenvalue mass, with that mass.
  std::vector<NormalAtom> eigenvalue_atoms() const;
  // phi(|x0 - lambda|^2) and 1/phi(|x0 - lambda|^{-2}) without building a law.
  double second_moment_about(cplx lambda) const;
  double inverse_second_moment_about(cplx lambda) const;

 private:
  std::variant<RealMeasure, std::vector<NormalAtom>, Eigen::MatrixXcd> v_;
};

// Trace functionals of h = (lambda - x0)^*(lambda - x0) + s^2 and
// k = (lambda - x0)(lambda - x0)^* + s^2.
struct ResolventFunctionals {
  double phi_hinv = 0;    // phi(h^-1)
  double phi_hinv2 = 0;   // phi(h^-2)
  double phi_hk = 0;      // phi(h^-1 k^-1)
  cplx phi_x_hinv;        // phi((lambda - x0)^* h^-1)
  cplx phi_x_hinv2;       // phi((lambda - x0) h^-2)
};

PositiveMeasure modulus_distribution(const OperatorModel& x0, cplx lambda);
ResolventFunctionals resolvent_functionals(const OperatorModel& x0, cplx lambda, double s);

struct HaarUnitary {
  double gamma;
};
struct Circular {
  double variance;
};
struct CircularCauchy {
  double scale;
};
struct CircularCauchyPower {
  int power;
};
struct GeneralRDiagonal {
  PositiveMeasure modulus;
};

class RDiagonalSpec {
 public:
  using Variant = std::variant<GeneralRDiagonal, HaarUnitary, Circular, CircularCauchy, CircularCauchyPower>;

  static RDiagonalSpec general(PositiveMeasure modulus);
  static RDiagonalSpec haar(double gamma);
  static RDiagonalSpec circular(double variance);
  static RDiagonalSpec circular_cauchy(double scale);
  static RDiagonalSpec circular_cauchy_power(int n);

  const Variant& variant() const { return v_; }
  template <class T>
  bool is() const { return std::holds_alternative<T>(v_); }
  template <class T>
  const T& as() const { return std::get<T>(v_); }

  // mu_{|T|}
  const PositiveMeasure& modulus() const { return modulus_; }
  std::string describe() const;

 private:
  RDiagonalSpec(Variant v, PositiveMeasure m) : v_(std::move(v)), modulus_(std::move(m)) {}
  Variant v_;
  PositiveMeasure modulus_;
};

SymmetricMeasure rdiag_symmetrized_modulus(const RDiagonalSpec& T);

// psi of mu_{T*T} on the negative axis and the S-transform on (mu({0}) - 1, 0).
double psi_transform(const PositiveMeasure& modulus, double z);
double s_transform(const PositiveMeasure& modulus, double z);

// mu_T(closed disk of radius r) for the Brown measure of T.
double radial_cdf(const RDiagonalSpec& T, double r);

}  // namespace brownkit
