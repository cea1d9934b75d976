#include "brownkit/brown.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <boost/math/tools/toms748_solve.hpp>

#include "brownkit/errors.hpp"

namespace brownkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

using boost::math::tools::eps_tolerance;
using boost::math::tools::toms748_solve;

// Eigenvalue mass of x0 at lambda, i.e. mu_{|x0 - lambda|}({0}).
double x0_mass_at(const OperatorModel& x0, cplx lambda) {
  switch (x0.kind()) {
    case OperatorModel::Kind::selfadjoint:
      return lambda.imag() == 0.0 ? x0.spectrum().mass_at(lambda.real()) : 0.0;
    case OperatorModel::Kind::normal: {
      double m = 0.0;
      for (const auto& a : x0.normal_atoms())
        if (std::abs(a.z - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda))) m += a.mass;
      return m;
    }
    case OperatorModel::Kind::matrix: {
      Eigen::MatrixXcd a = x0.matrix();
      a.diagonal().array() -= lambda;
      const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
      const double thr = 1e-8 * std::max(1.0, x0.matrix().norm());
      return double((sv.array() <= thr).count()) / double(sv.size());
    }
  }
  return 0.0;
}

// Root of an increasing function on (0, inf), bracketed by factor-4 steps.
template <class F>
double increasing_root(F g, double start, const char* what) {
  double lo = start, hi = start;
  double glo = g(lo), ghi = glo;
  int steps = 0;
  while (glo >= 0) {
    if (++steps > 300) throw SolverFailure(what, lo, hi, steps);
    hi = lo;
    ghi = glo;
    lo *= 0.25;
    glo = g(lo);
  }
  while (ghi <= 0) {
    if (++steps > 600) throw SolverFailure(what, lo, hi, steps);
    lo = hi;
    glo = ghi;
    hi *= 4.0;
    ghi = g(hi);
  }
  if (glo == 0) return lo;
  boost::uintmax_t it = 200;
  const auto r = toms748_solve(g, lo, hi, glo, ghi, eps_tolerance<double>(52), it);
  return 0.5 * (r.first + r.second);
}

bool margins_inside(const DomainVerdict& v) {
  return v.margin_inner > kBoundaryMargin && v.margin_outer > kBoundaryMargin;
}

double general_density(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda, const DomainVerdict& v) {
  if (v.atom_candidate) throw AtomCandidateError("lambda is an atom candidate of the Brown measure");
  const PositiveMeasure mod1 = modulus_distribution(x0, lambda);
  const ModulusLaw& law1 = mod1.law();
  const ModulusLaw& law2 = T.modulus().law();
  const auto c = classify_boundary(law1, law2);
  if (c.case_id == BoundaryCase::zero_zero) throw AtomCandidateError("boundary values vanish together");
  if (c.case_id != BoundaryCase::finite_finite) return 0.0;

  const double s1 = c.s1_0, s2 = c.s2_0;
  const auto tv1 = transforms(law1, s1);
  const auto tv2 = transforms(law2, s2);
  const auto F = resolvent_functionals(x0, lambda, s1);
  const double dp2 = tv2.dp;
  const double x2 = std::norm(F.phi_x_hinv2) / (F.phi_hinv * F.phi_hinv);
  const double den = tv1.p * dp2 / s1 + (s1 - dp2) * tv1.dp;
  const double rho = (s1 * s1 * F.phi_hk + 2 * s1 * (s1 - dp2) * x2 / den) / kPi;
  return std::max(rho, 0.0);
}

double haar_density(double gamma, const OperatorModel& x0, cplx lambda) {
  // p1(s) = 1/phi(h^-1) - s^2 = gamma^2
  auto g = [&](double s) { return 1.0 / resolvent_functionals(x0, lambda, s).phi_hinv - s * s - gamma * gamma; };
  const double s1 = increasing_root(g, 1.0, "Haar boundary value not bracketed");
  const auto F = resolvent_functionals(x0, lambda, s1);
  const double rho = s1 * s1 * F.phi_hk + std::norm(F.phi_x_hinv2) / (F.phi_hinv2 - F.phi_hinv * F.phi_hinv);
  return std::max(rho / kPi, 0.0);
}

double circular_density(double eps, const OperatorModel& x0, cplx lambda) {
  // phi(h^-1)(s) = 1/eps, decreasing in s
  auto g = [&](double s) { return 1.0 / eps - resolvent_functionals(x0, lambda, s).phi_hinv; };
  const double s1 = increasing_root(g, std::sqrt(eps), "circular boundary value not bracketed");
  const auto F = resolvent_functionals(x0, lambda, s1);
  const double rho = std::norm(F.phi_x_hinv2) / F.phi_hinv2 + s1 * s1 * F.phi_hk;
  return std::max(rho / kPi, 0.0);
}

double cauchy_density(double a, const OperatorModel& x0, cplx lambda) {
  const auto F = resolvent_functionals(x0, lambda, a);
  return a * a / kPi * F.phi_hk;
}

bool has_closed_form(const RDiagonalSpec& T) {
  return T.is<HaarUnitary>() || T.is<Circular>() || T.is<CircularCauchy>();
}

double density_given_verdict(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda, const DomainVerdict& v,
                             DensityRoute route) {
  if (!margins_inside(v)) return 0.0;
  if (route == DensityRoute::closed_form && !has_closed_form(T))
    throw UnsupportedMeasureError("no closed-form density for " + T.describe());
  if (route == DensityRoute::general || !has_closed_form(T)) return general_density(T, x0, lambda, v);
  if (T.is<HaarUnitary>()) return haar_density(T.as<HaarUnitary>().gamma, x0, lambda);
  if (T.is<Circular>()) return circular_density(T.as<Circular>().variance, x0, lambda);
  return cauchy_density(T.as<CircularCauchy>().scale, x0, lambda);
}

}  // namespace

DomainVerdict omega_membership(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda) {
  const auto bt = lambda_bounds(T.modulus().law());
  const double inv = x0.inverse_second_moment_about(lambda);
  const double l1x = std::isfinite(inv) ? 1.0 / std::sqrt(inv) : 0.0;
  const double l2x = std::sqrt(x0.second_moment_about(lambda));

  DomainVerdict v;
  v.margin_inner = l1x == 0.0 ? kInf : bt.lambda2 / l1x - 1.0;
  // ||T^-1||_2 = inf dominates even when x0 - lambda vanishes
  v.margin_outer = bt.lambda1 == 0.0 ? kInf : l2x / bt.lambda1 - 1.0;
  v.in_omega = v.margin_inner > 0 && v.margin_outer > 0;
  const double mt = T.modulus().mass_at_zero();
  if (mt > 0.0) {
    const double mx = x0_mass_at(x0, lambda);
    v.atom_candidate = mx > 0.0 && mt + mx >= 1.0 - 1e-12;
  } else {
    v.atom_candidate = x0_mass_at(x0, lambda) >= 1.0 - 1e-12;
  }
  return v;
}

std::vector<cplx> atom_candidates(const RDiagonalSpec& T, const OperatorModel& x0) {
  const double mt = T.modulus().mass_at_zero();
  std::vector<cplx> out;
  for (const auto& a : x0.eigenvalue_atoms())
    if (mt + a.mass >= 1.0 - 1e-12) out.push_back(a.z);
  return out;
}

FkDeterminant fk_determinant(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda, double t) {
  if (!(t >= 0) || !std::isfinite(t)) throw DomainError("fk_determinant needs t >= 0");
  const PositiveMeasure mod1 = modulus_distribution(x0, lambda);
  const ModulusLaw& law1 = mod1.law();
  const ModulusLaw& law2 = T.modulus().law();
  FkDeterminant out;

  auto finish = [&](double logv) {
    if (std::isnan(logv)) throw NumericalDegeneracyError("determinant evaluates to NaN");
    out.log_value = logv;
    out.value = std::exp(logv);
    return out;
  };

  // x0 - lambda = 0: the determinant is that of |T|^2 + t^2
  if (lambda_bounds(law1).lambda2 == 0.0) {
    out.boundary = BoundaryCase::inf_zero;
    return finish(0.5 * law2.log_moment(t));
  }

  if (t > 0) {
    const auto p = solve_subordination(law1, law2, t);
    return finish(0.5 * (law1.log_moment(p.s1) + law2.log_moment(p.s2)) - std::log(p.s1 + p.s2 - t));
  }

  const auto c = classify_boundary(law1, law2, false);
  out.boundary = c.case_id;
  switch (c.case_id) {
    case BoundaryCase::zero_inf: return finish(0.5 * law1.log_moment(0.0));
    case BoundaryCase::inf_zero: return finish(0.5 * law2.log_moment(0.0));
    case BoundaryCase::zero_zero:
      out.atom_dominated = true;
      out.value = 0.0;
      out.log_value = -kInf;
      return out;
    case BoundaryCase::finite_finite:
      return finish(0.5 * (law1.log_moment(c.s1_0) + law2.log_moment(c.s2_0)) - std::log(c.s1_0 + c.s2_0));
  }
  return out;
}

double brown_density(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda, DensityRoute route) {
  return density_given_verdict(T, x0, lambda, omega_membership(T, x0, lambda), route);
}

double circular_selfadjoint_density(const RealMeasure& x0, double eps, cplx lambda) {
  if (!(eps > 0) || !std::isfinite(eps)) throw DomainError("circular variance must be positive");
  const double a = lambda.real(), b = std::abs(lambda.imag());
  const double inv = x0.shifted_inverse_square(a, b);
  if (!(std::sqrt(eps * inv) - 1.0 > kBoundaryMargin)) return 0.0;

  // v(x)^2 = b^2 + s1(0)^2 where E[1/((u-x)^2 + v^2)] = 1/eps
  auto v_of = [&](double x) {
    auto g = [&](double v) { return 1.0 / eps - x0.shifted_inverse_square(x, v); };
    return increasing_root(g, std::max(b, std::sqrt(eps)), "v_eps not bracketed");
  };
  auto G = [&](double x) {
    const auto k = x0.shifted_kernels(x, v_of(x));
    return k.xd + x * k.d;  // E[u/q]
  };
  const double h = 1e-4 * std::max(1.0, std::abs(a));
  const double dG = (G(a + h) - G(a - h)) / (2 * h);
  return std::max((1.0 - 0.5 * eps * dG) / (kPi * eps), 0.0);
}

RingRadii ring_radii(const RDiagonalSpec& T1, const RDiagonalSpec& T2) {
  const auto b1 = lambda_bounds(T1.modulus().law());
  const auto b2 = lambda_bounds(T2.modulus().law());
  RingRadii r;
  if (b1.lambda1 >= b2.lambda2)
    r.r_inner_raw = b1.lambda1 * b1.lambda1 - b2.lambda2 * b2.lambda2;
  else if (b2.lambda1 >= b1.lambda2)
    r.r_inner_raw = b2.lambda1 * b2.lambda1 - b1.lambda2 * b1.lambda2;
  r.r_inner = std::sqrt(r.r_inner_raw);
  r.r_outer = std::sqrt(b1.lambda2 * b1.lambda2 + b2.lambda2 * b2.lambda2);
  return r;
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw ConfigError("grid resolution must be at least 2x2");
  if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && std::isfinite(y_lo) && std::isfinite(y_hi)) ||
      !(x_lo < x_hi) || !(y_lo < y_hi))
    throw ConfigError("grid bounds must be finite and ordered");
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BROWNKIT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return int(std::min<long>(n, 256));
  }
  return 1;
}

BrownDensityGrid density_grid(const RDiagonalSpec& T, const OperatorModel& x0, const GridSpec& grid,
                              const GridOptions& options) {
  grid.validate();
  BrownDensityGrid out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  out.flags.assign(grid.size(), 0);
  out.atom_candidates = atom_candidates(T, x0);
  if (options.subsample < 1) throw ConfigError("subsample must be at least 1");
  const int k = options.subsample;

  auto row = [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t idx = std::size_t(j) * grid.nx + i;
      const cplx lambda(grid.x(i), grid.y(j));
      std::uint8_t f = 0;
      double val = 0.0;
      try {
        const auto v = omega_membership(T, x0, lambda);
        if (v.in_omega) f |= kInOmega;
        if (v.atom_candidate) f |= kAtomCandidate;
        if (k == 1) {
          val = density_given_verdict(T, x0, lambda, v, options.route);
        } else {
          for (int b = 0; b < k; ++b)
            for (int a = 0; a < k; ++a) {
              const cplx z(grid.x_lo + (i + (a + 0.5) / k) * grid.dx(), grid.y_lo + (j + (b + 0.5) / k) * grid.dy());
              val += density_given_verdict(T, x0, z, omega_membership(T, x0, z), options.route);
            }
          val /= double(k * k);
        }
        if (!std::isfinite(val)) {
          val = 0.0;
          f |= kFailed;
        }
      } catch (const AtomCandidateError&) {
        f |= kAtomCandidate;
      } catch (const Error&) {
        f |= kFailed;
      }
      out.values[idx] = val;
      out.flags[idx] = f;
    }
  };

  const int nt = std::min(resolve_thread_count(options.threads), grid.ny);
  if (nt <= 1) {
    for (int j = 0; j < grid.ny; ++j) row(j);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nt; ++w)
      pool.emplace_back([&, w] {
        for (int j = w; j < grid.ny; j += nt) row(j);
      });
    for (auto& th : pool) th.join();
  }

  double mass = 0.0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    mass += out.values[k];
    if (out.flags[k] & kFailed) ++out.failed_cells;
  }
  out.total_mass_estimate = mass * grid.cell_area();
  return out;
}

bool ellipse_boundary_check(const RDiagonalSpec& T, double t, cplx lambda) {
  if (!(t > 0)) throw DomainError("semicircular variance must be positive");
  const auto x0 = OperatorModel::selfadjoint(RealMeasure::semicircle(0.0, t));
  return omega_membership(T, x0, lambda).in_omega;
}

std::vector<cplx> omega_boundary_on_segment(const RDiagonalSpec& T, const OperatorModel& x0, cplx a, cplx b,
                                            int samples) {
  if (samples < 2) throw ConfigError("boundary search needs at least 2 samples");
  auto g = [&](double tau) {
    const auto v = omega_membership(T, x0, a + tau * (b - a));
    const double m = std::min(v.margin_inner, v.margin_outer);
    return std::clamp(m, -1e300, 1e300);
  };
  std::vector<cplx> out;
  double t0 = 0.0, g0 = g(0.0);
  for (int k = 1; k <= samples; ++k) {
    const double t1 = double(k) / samples, g1 = g(t1);
    if ((g0 > 0) != (g1 > 0) && g0 != 0.0 && g1 != 0.0) {
      boost::uintmax_t it = 200;
      const auto r = toms748_solve(g, t0, t1, g0, g1, eps_tolerance<double>(52), it);
      const double tau = 0.5 * (r.first + r.second);
      // sign flips across a pole of the inner margin are not boundary points
      if (std::abs(g(tau)) < kBoundaryMargin) out.push_back(a + tau * (b - a));
    } else if (g1 == 0.0) {
      out.push_back(a + t1 * (b - a));
    }
    t0 = t1;
    g0 = g1;
  }
  return out;
}

}  // namespace brownkit
