#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "brownkit/brown.hpp"

namespace brownkit::rmt {

// SplitMix64.  Sample k of a run draws from stream(seed, k), so results do
// not depend on evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  double uniform();  // (0, 1), 53 bits
  double normal();   // Box-Muller
  cplx complex_normal();  // E|z|^2 = 1

 private:
  std::uint64_t state_;
  double spare_ = 0;
  bool has_spare_ = false;
};

Eigen::MatrixXcd ginibre(int n, Rng& rng);  // i.i.d. complex_normal entries
Eigen::MatrixXcd sample_haar_unitary(int n, Rng& rng);

struct EnsembleSpec {
  int n = 200;
  int samples = 10;
  std::uint64_t seed = 1;
  double t_reg = 1e-3;
  RDiagonalSpec T = RDiagonalSpec::circular(1.0);
  OperatorModel x0 = OperatorModel::zero();
  bool stochastic_sigma = false;  // Sigma from random quantiles instead of (i - 1/2)/n

  void validate() const;
};

// x0 at size n: a diagonal for normal models, a block copy for matrices.
// imbalance = sum over atoms of |count/n - mass|.
Eigen::MatrixXcd realize_x0(const OperatorModel& x0, int n, double* imbalance = nullptr);

struct Realization {
  Eigen::MatrixXcd x;
  double imbalance = 0;
};

Realization realize_model(const EnsembleSpec& spec, Rng& rng);

struct HermitianEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  int sweeps = 0;
  double residual = 0;  // max_i ||A v_i - mu_i v_i|| / ||A||
};

// Cyclic Jacobi; SolverFailure when off-diagonal mass survives max_sweeps.
HermitianEigen jacobi_eigensolver(const Eigen::MatrixXcd& a, int max_sweeps = 40);

enum class LogdetMethod { jacobi, cholesky };

// (1/2n) sum log(sigma_i^2 + t^2) over singular values of X - lambda.
double hermitized_logdet(const Eigen::MatrixXcd& x, cplx lambda, double t,
                         LogdetMethod method = LogdetMethod::jacobi);

// Cholesky route for many lambda against one X: X^*X is formed once.
class HermitizedLogdet {
 public:
  explicit HermitizedLogdet(const Eigen::MatrixXcd& x);
  double operator()(cplx lambda, double t) const;

 private:
  Eigen::MatrixXcd x_, xx_;
};

struct EmpiricalGrid {
  GridSpec grid;
  std::vector<double> values;  // row-major like BrownDensityGrid
  double mass = 0;             // after clamping
  double clamped_mass = 0;     // negative mass removed
  double imbalance = 0;        // x0 rounding, from the first sample
};

EmpiricalGrid empirical_brown_density(const EnsembleSpec& spec, const GridSpec& grid, int threads = 0);

struct ComparisonReport {
  double l1_distance = 0;
  double max_abs = 0;
  double mass_theory = 0;
  double mass_empirical = 0;
  std::vector<double> residuals;  // theory - empirical per cell
};

ComparisonReport compare_report(const BrownDensityGrid& theory, const EmpiricalGrid& empirical);

}  // namespace brownkit::rmt
