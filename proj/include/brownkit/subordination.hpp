#pragma once

#include <optional>
#include <string>

#include "brownkit/measures.hpp"

namespace brownkit {

enum class BoundaryCase { finite_finite, zero_inf, inf_zero, zero_zero };

const char* to_string(BoundaryCase c);

// s1(t), s2(t) on the imaginary axis for mu1 [+] mu2.
struct SubordinationPair {
  double t = 0;
  double s1 = 0;
  double s2 = 0;
  double h_conv = 0;     // h_{mu1}(s1)
  int iterations = 0;    // both branches together
  double residual = 0;   // largest fixed-point residual of the two branches
  double mismatch = 0;   // max |h_i(s_i) - 1/(s1+s2-t)|
};

// Limits of s1(t), s2(t) as t -> 0.
struct BoundaryClassification {
  BoundaryCase case_id = BoundaryCase::finite_finite;
  double s1_0 = 0;
  double s2_0 = 0;
  std::optional<double> ratio_t_over_s1;   // zero_inf
  std::optional<double> limit_t_times_s2;  // zero_inf
  std::optional<double> ratio_t_over_s2;   // inf_zero
  std::optional<double> limit_t_times_s1;  // inf_zero
};

SubordinationPair solve_subordination(const ModulusLaw& mu1, const ModulusLaw& mu2, double t);
SubordinationPair solve_subordination(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double t);

// A tie lambda1(mu1) = lambda2(mu2) (or mirrored) against a single-point law
// leaves s(0) undetermined and raises UnsupportedMeasureError.  With
// reject_degenerate_ties = false such ties fall to ZERO_INF / INF_ZERO, which
// is the side the determinant is continuous from.
BoundaryClassification classify_boundary(const ModulusLaw& mu1, const ModulusLaw& mu2,
                                         bool reject_degenerate_ties = true);
BoundaryClassification classify_boundary(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2);

double free_convolution_h(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double t);

// One branch of the system: the root s > t of s - t - f_b(t + f_a(s)).
struct BranchSolution {
  double s;
  double residual;
  int iterations;
};
BranchSolution solve_branch(const ModulusLaw& a, const ModulusLaw& b, double t);

// s - t - f_b(t + f_a(s)), exposed for bracketing checks.
double branch_residual(const ModulusLaw& a, const ModulusLaw& b, double t, double s);

}  // namespace brownkit
