#pragma once

#include <memory>
#include <optional>
#include <vector>

namespace brownkit {

struct Atom {
  double x;
  double mass;
};

// Piecewise-linear density: values[i] at grid[i], linear in between.
struct DensityPiece {
  std::vector<double> grid;
  std::vector<double> values;
};

enum class Tail { none, cauchy_modulus };

// Integrals against a law of |X| at s > 0, with q = s^2 + u^2:
// d = E[1/q], e = E[1/q^2], n = E[u^2/q], m = E[u^2/q^2].
struct Kernels {
  double d, e, n, m;
};

// A law on [0, inf), seen through the integrals the transforms need.
class ModulusLaw {
 public:
  virtual ~ModulusLaw() = default;
  virtual Kernels kernels(double s) const = 0;
  // E[log(s^2 + u^2)], s >= 0 (may be -inf at s = 0 with an atom at 0).
  virtual double log_moment(double s) const = 0;
  virtual double second_moment() const = 0;          // may be +inf
  virtual double inverse_second_moment() const = 0;  // may be +inf
  virtual double mass_at_zero() const = 0;
  virtual double cdf(double u) const = 0;
  virtual double quantile(double q) const;
};

// Probability measure on the real line: atoms plus piecewise-linear density,
// or a semicircle law.  Used for spectra of selfadjoint x0.
class RealMeasure {
 public:
  struct Shifted {
    double d, e, n, m, xd, xe;  // v = u - a, q = sigma^2 + v^2; xd = E[v/q], xe = E[v/q^2]
  };

  static RealMeasure from_parts(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);
  static RealMeasure dirac(double x);
  static RealMeasure semicircle(double center, double variance);

  Shifted shifted_kernels(double a, double sigma) const;   // sigma > 0
  double shifted_log(double a, double sigma) const;        // E[log(sigma^2 + (u-a)^2)]
  double shifted_inverse_square(double a, double b) const; // E[1/((u-a)^2 + b^2)]
  double shifted_second_moment(double a) const;            // E[(u-a)^2]
  double mass_at(double a) const;
  double mass_in(double lo, double hi) const;              // closed interval
  double mean() const;
  double variance() const;
  double cdf(double x) const;
  double quantile(double q) const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  bool is_semicircle() const { return semi_.has_value(); }
  double semicircle_center() const { return semi_ ? semi_->center : 0.0; }
  double semicircle_variance() const { return semi_ ? semi_->variance : 0.0; }
  bool is_atomic() const { return pieces_.empty() && !semi_; }
  double support_lo() const;
  double support_hi() const;

 private:
  struct Semi {
    double center, variance;
  };
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
  std::optional<Semi> semi_;
};

// Probability measure on [0, inf).
class PositiveMeasure {
 public:
  enum class Family { empirical, quarter_circle, cauchy_modulus, cauchy_power, derived };

  static PositiveMeasure from_parts(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                                    Tail tail = Tail::none);
  static PositiveMeasure dirac(double x);
  static PositiveMeasure atomic(std::vector<Atom> atoms);
  // Modulus of a circular element of the given variance.
  static PositiveMeasure quarter_circle(double variance);
  // Modulus of a circular Cauchy element x y^{-1} scaled by a.
  static PositiveMeasure cauchy_modulus(double scale);
  // Law whose symmetrization has h(s) = 1/(s + s^((n-1)/(n+1))).
  static PositiveMeasure cauchy_power_modulus(int n);
  // Law of |u - lambda| for u distributed by nu.
  static PositiveMeasure shifted_modulus(const RealMeasure& nu, double re, double im);
  static PositiveMeasure from_law(std::shared_ptr<const ModulusLaw> law);

  const ModulusLaw& law() const { return *law_; }
  Family family() const { return family_; }
  double family_parameter() const { return param_; }
  Tail tail() const { return tail_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }

  Kernels kernels(double s) const { return law_->kernels(s); }
  double log_moment(double s) const { return law_->log_moment(s); }
  double second_moment() const { return law_->second_moment(); }
  double inverse_second_moment() const { return law_->inverse_second_moment(); }
  double mass_at_zero() const { return law_->mass_at_zero(); }
  double cdf(double u) const { return law_->cdf(u); }
  double quantile(double q) const { return law_->quantile(q); }
  double total_mass() const;

 private:
  std::shared_ptr<const ModulusLaw> law_;
  Family family_ = Family::derived;
  double param_ = 0.0;
  Tail tail_ = Tail::none;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
};

// Symmetric law on the line, stored as its modulus.
class SymmetricMeasure {
 public:
  const PositiveMeasure& modulus() const { return modulus_; }
  const ModulusLaw& law() const { return modulus_.law(); }
  double mass_at_zero() const { return modulus_.mass_at_zero(); }

 private:
  explicit SymmetricMeasure(PositiveMeasure m) : modulus_(std::move(m)) {}
  friend SymmetricMeasure symmetrize(const PositiveMeasure& nu);
  PositiveMeasure modulus_;
};

struct LambdaBounds {
  double lambda1;  // 0 when E[u^-2] diverges
  double lambda2;  // +inf when E[u^2] diverges
};

// Everything the solvers need at one s.
struct TransformValues {
  double s, h, f, p, dp;
  Kernels k;
};

SymmetricMeasure symmetrize(const PositiveMeasure& nu);
PositiveMeasure modulus_pushforward(const SymmetricMeasure& mu);

SymmetricMeasure bernoulli(double gamma);          // (delta_gamma + delta_-gamma)/2
SymmetricMeasure semicircle(double variance);
SymmetricMeasure symmetric_cauchy(double scale);

double h_transform(const SymmetricMeasure& mu, double s);
double f_transform(const SymmetricMeasure& mu, double s);
double p_ratio(const SymmetricMeasure& mu, double s);
double p_ratio_deriv(const SymmetricMeasure& mu, double s);
TransformValues transforms(const ModulusLaw& law, double s);
TransformValues transforms(const SymmetricMeasure& mu, double s);

LambdaBounds lambda_bounds(const ModulusLaw& law);
LambdaBounds lambda_bounds(const SymmetricMeasure& mu);

double density_at_zero_of_convolution(double s1_0, double s2_0);

}  // namespace brownkit
