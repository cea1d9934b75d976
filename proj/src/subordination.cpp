#include "brownkit/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "brownkit/errors.hpp"

namespace brownkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDoublings = 60;
constexpr int kMaxIterations = 300;

void reject_delta_zero(const ModulusLaw& mu) {
  if (mu.mass_at_zero() >= 1.0 || mu.second_moment() == 0.0)
    throw UnsupportedMeasureError("delta_0 has no f-transform");
}

// f and its derivative, f' = (p' - f)/s.
struct FVal {
  double f, df;
};
FVal f_of(const ModulusLaw& mu, double s) {
  const auto tv = transforms(mu, s);
  return {tv.f, (tv.dp - tv.f) / s};
}

double tolerance(double s) { return 1e-12 * std::max(1.0, s); }

}  // namespace

const char* to_string(BoundaryCase c) {
  switch (c) {
    case BoundaryCase::finite_finite: return "FINITE_FINITE";
    case BoundaryCase::zero_inf: return "ZERO_INF";
    case BoundaryCase::inf_zero: return "INF_ZERO";
    case BoundaryCase::zero_zero: return "ZERO_ZERO";
  }
  return "?";
}

double branch_residual(const ModulusLaw& a, const ModulusLaw& b, double t, double s) {
  return s - t - f_of(b, t + f_of(a, s).f).f;
}

// Damped fixed-point steps inside a shrinking bracket; Newton once the bracket
// is narrow, bisection whenever a step leaves the bracket or stalls.
BranchSolution solve_branch(const ModulusLaw& a, const ModulusLaw& b, double t) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("subordination needs t > 0");

  auto eval = [&](double s, double& dr) {
    const FVal fa = f_of(a, s);
    const FVal fb = f_of(b, t + fa.f);
    dr = 1.0 - fb.df * fa.df;
    return s - t - fb.f;
  };

  double lo = t, hi = t + f_of(b, t).f + 1.0;
  double dr = 0.0;
  double rhi = eval(hi, dr);
  int doublings = 0;
  while (rhi <= 0) {
    if (++doublings > kMaxDoublings) throw SolverFailure("no sign change below the search cap", lo, hi, 0);
    lo = hi;
    hi = t + 2 * (hi - t);
    rhi = eval(hi, dr);
  }

  double x = hi;
  double r = rhi;
  double prev_abs = kInf;
  for (int it = 1; it <= kMaxIterations; ++it) {
    if (std::abs(r) <= tolerance(x)) return {x, r, it};
    if (r < 0) lo = x;
    else hi = x;

    const bool narrow = hi - lo < 1e-3 * std::max(1.0, x);
    double cand = narrow && dr > 0 ? x - r / dr : x - 0.5 * r;
    const bool stalled = std::abs(r) > 0.5 * prev_abs;
    if (!(cand > lo && cand < hi) || (!narrow && stalled)) {
      cand = (lo > 0 && hi > 4 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    prev_abs = std::abs(r);
    if (cand == x || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) {
      // bracket exhausted at machine resolution
      if (std::abs(r) <= 1e3 * tolerance(x)) return {x, r, it};
      throw SolverFailure("subordination bracket collapsed with residual " + std::to_string(r), lo, hi, it);
    }
    x = cand;
    r = eval(x, dr);
  }
  throw SolverFailure("subordination iteration cap reached", lo, hi, kMaxIterations);
}

SubordinationPair solve_subordination(const ModulusLaw& mu1, const ModulusLaw& mu2, double t) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("subordination needs t > 0");
  reject_delta_zero(mu1);
  reject_delta_zero(mu2);
  // Each branch is solved on its own equation so that swapping the measures
  // swaps the answers bit for bit.
  const auto b1 = solve_branch(mu1, mu2, t);
  const auto b2 = solve_branch(mu2, mu1, t);
  SubordinationPair p;
  p.t = t;
  p.s1 = b1.s;
  p.s2 = b2.s;
  p.h_conv = transforms(mu1, p.s1).h;
  p.iterations = b1.iterations + b2.iterations;
  p.residual = std::max(std::abs(b1.residual), std::abs(b2.residual));
  const double hsum = 1.0 / (p.s1 + p.s2 - t);
  const double h2 = transforms(mu2, p.s2).h;
  p.mismatch = std::max(std::abs(p.h_conv - hsum), std::abs(h2 - hsum));
  return p;
}

SubordinationPair solve_subordination(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double t) {
  return solve_subordination(mu1.law(), mu2.law(), t);
}

double free_convolution_h(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2, double t) {
  return solve_subordination(mu1, mu2, t).h_conv;
}

BoundaryClassification classify_boundary(const ModulusLaw& mu1, const ModulusLaw& mu2, bool reject_degenerate_ties) {
  reject_delta_zero(mu1);
  reject_delta_zero(mu2);
  const auto b1 = lambda_bounds(mu1), b2 = lambda_bounds(mu2);
  BoundaryClassification c;

  const bool single = b1.lambda1 == b1.lambda2 || b2.lambda1 == b2.lambda2;
  if (reject_degenerate_ties && single && (b1.lambda1 == b2.lambda2 || b2.lambda1 == b1.lambda2))
    throw UnsupportedMeasureError("tie against a single-point law: the boundary values are not determined");

  if (b1.lambda1 >= b2.lambda2) {
    const double l1 = b1.lambda1 * b1.lambda1, l2 = b2.lambda2 * b2.lambda2;
    c.case_id = BoundaryCase::zero_inf;
    c.s1_0 = 0.0;
    c.s2_0 = kInf;
    c.ratio_t_over_s1 = (l1 - l2) / l1;
    c.limit_t_times_s2 = l1 - l2;
    return c;
  }
  if (b2.lambda1 >= b1.lambda2) {
    const double l1 = b2.lambda1 * b2.lambda1, l2 = b1.lambda2 * b1.lambda2;
    c.case_id = BoundaryCase::inf_zero;
    c.s1_0 = kInf;
    c.s2_0 = 0.0;
    c.ratio_t_over_s2 = (l1 - l2) / l1;
    c.limit_t_times_s1 = l1 - l2;
    return c;
  }
  if (b1.lambda1 == 0.0 && b2.lambda1 == 0.0 && mu1.mass_at_zero() + mu2.mass_at_zero() >= 1.0) {
    c.case_id = BoundaryCase::zero_zero;
    c.s1_0 = 0.0;
    c.s2_0 = 0.0;
    return c;
  }

  // Overlapping intervals: p1(s) = p2(f1(s)).  The left side minus the right
  // runs from lambda1(mu1)^2 - lambda2(mu2)^2 < 0 to lambda2(mu1)^2 - lambda1(mu2)^2 > 0.
  auto balance = [&](double s) {
    const auto t1 = transforms(mu1, s);
    return t1.p - transforms(mu2, t1.f).p;
  };
  double lo = 1.0, hi = 1.0;
  double blo = balance(lo), bhi = blo;
  int steps = 0;
  while (blo >= 0) {
    if (++steps > 250 || lo < 1e-150)
      throw SolverFailure("balance equation has no positive root below the search range", lo, hi, steps);
    hi = lo;
    bhi = blo;
    lo *= 0.25;
    blo = balance(lo);
  }
  while (bhi <= 0) {
    if (++steps > 500 || hi > 1e150)
      throw SolverFailure("balance equation has no positive root above the search range", lo, hi, steps);
    lo = hi;
    blo = bhi;
    hi *= 4.0;
    bhi = balance(hi);
  }
  boost::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(balance, lo, hi, blo, bhi,
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
  c.case_id = BoundaryCase::finite_finite;
  c.s1_0 = 0.5 * (root.first + root.second);
  c.s2_0 = transforms(mu1, c.s1_0).f;
  return c;
}

BoundaryClassification classify_boundary(const SymmetricMeasure& mu1, const SymmetricMeasure& mu2) {
  return classify_boundary(mu1.law(), mu2.law());
}

}  // namespace brownkit
