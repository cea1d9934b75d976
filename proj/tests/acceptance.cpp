// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "brownkit/brown.hpp"
#include "brownkit/errors.hpp"
#include "brownkit/rmt.hpp"
#include "fixtures.hpp"

using namespace brownkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("criterion %2d %s  %s  %s\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

OperatorModel atomic_x0(std::vector<Atom> atoms) {
  return OperatorModel::selfadjoint(RealMeasure::from_parts(std::move(atoms), {}));
}

// ---------------------------------------------------------------------------

Verdict circular_law() {
  const auto t0 = Clock::now();
  GridSpec g{-1.5, 1.5, 101, -1.5, 1.5, 101};
  const auto d = density_grid(RDiagonalSpec::circular(1), OperatorModel::zero(), g);
  const double secs = seconds_since(t0);
  double worst = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (std::hypot(g.x(i), g.y(j)) <= 0.95)
        worst = std::max(worst, std::abs(d.values[std::size_t(j) * g.nx + i] - 1 / M_PI));
  const double mass_err = std::abs(d.total_mass_estimate - 1);
  return {worst < 1e-8 && mass_err < 0.02 && secs < 10,
          fmt("max|rho-1/pi|=%.2e mass_err=%.4f time=%.2fs", worst, mass_err, secs)};
}

Verdict circular_cauchy() {
  const auto T = RDiagonalSpec::circular_cauchy(1);
  double worst = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const cplx l(-2.1 + 1.05 * i + 0.013, -1.7 + 0.9 * j + 0.021);
      const double want = 1 / (M_PI * std::pow(1 + std::norm(l), 2));
      worst = std::max(worst, std::abs(brown_density(T, OperatorModel::zero(), l) - want));
    }
  double cdf_worst = 0;
  for (double r : {0.05, 0.3, 0.7, 1.0, 1.9, 4.0, 25.0})
    cdf_worst = std::max(cdf_worst, std::abs(radial_cdf(T, r) - r * r / (1 + r * r)));
  return {worst < 1e-8 && cdf_worst < 1e-10, fmt("density_err=%.2e cdf_err=%.2e", worst, cdf_worst)};
}

Verdict cauchy_subordination() {
  const auto cauchy = symmetric_cauchy(1.0);
  std::vector<SymmetricMeasure> mus{bernoulli(1.0), semicircle(1.0), symmetric_cauchy(2.0),
                                    symmetrize(PositiveMeasure::atomic({{0.5, 0.3}, {1.0, 0.4}, {2.0, 0.3}})),
                                    symmetrize(PositiveMeasure::from_parts({}, {{{0.0, 2.0}, {0.5, 0.5}}}))};
  double worst = 0;
  for (const auto& mu : mus)
    for (double t : {0.1, 1.0, 10.0}) worst = std::max(worst, std::abs(solve_subordination(mu, cauchy, t).s1 - (t + 1)));
  return {worst < 1e-10, fmt("max|s1-(t+1)|=%.2e over 5 measures x 3 times", worst)};
}

Verdict semicircle_pair() {
  const auto c = classify_boundary(semicircle(1.0), semicircle(1.0));
  const double want = 1 / std::sqrt(2.0);
  const double e1 = std::abs(c.s1_0 - want), e2 = std::abs(c.s2_0 - want);
  // semicircle of variance v at 0: sqrt(4v)/(2 pi v)
  const double v = 2;
  const double e3 = std::abs(density_at_zero_of_convolution(c.s1_0, c.s2_0) - std::sqrt(4 * v) / (2 * M_PI * v));
  return {c.case_id == BoundaryCase::finite_finite && e1 < 1e-9 && e2 < 1e-9 && e3 < 1e-9,
          fmt("s1_err=%.2e s2_err=%.2e density_err=%.2e", e1, e2, e3)};
}

Verdict boundary_asymptotics() {
  const double t = 1e-6;
  const auto p = solve_subordination(bernoulli(2.0), semicircle(1.0), t);
  const double r1 = std::abs(t / p.s1 - 0.75) / 0.75, r2 = std::abs(t * p.s2 - 3.0) / 3.0;
  return {r1 < 1e-3 && r2 < 1e-3, fmt("t/s1=%.6f t*s2=%.6f rel_err=%.2e", t / p.s1, t * p.s2, std::max(r1, r2))};
}

Verdict haar_determinant() {
  double worst = 0;
  for (double g : {0.5, 1.0, 2.0})
    for (double r : {0.1, g, 3 * g})
      for (double th : {0.0, 0.9, 2.5}) {
        const cplx l = std::polar(r, th);
        const auto d = fk_determinant(RDiagonalSpec::haar(g), OperatorModel::zero(), l, 0.0);
        worst = std::max(worst, std::abs(d.value - std::max(r, g)));
      }
  return {worst < 1e-10, fmt("max|Delta-max(|lambda|,gamma)|=%.2e", worst)};
}

Verdict oracle_agreement() {
  const std::vector<RDiagonalSpec> Ts{RDiagonalSpec::haar(0.8), RDiagonalSpec::haar(1.5), RDiagonalSpec::circular(1),
                                      RDiagonalSpec::circular(0.5), RDiagonalSpec::circular_cauchy(1)};
  const std::vector<OperatorModel> xs{OperatorModel::zero(), atomic_x0({{-1, 0.5}, {1, 0.5}})};
  double worst = 0;
  int compared = 0, nonzero = 0;
  for (const auto& T : Ts)
    for (const auto& x0 : xs)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
          const cplx l(-1.6 + 0.8 * i + 0.031, -1.6 + 0.8 * j + 0.047);
          const double a = brown_density(T, x0, l, DensityRoute::general);
          const double b = brown_density(T, x0, l, DensityRoute::closed_form);
          worst = std::max(worst, std::abs(a - b));
          ++compared;
          if (b > 0) ++nonzero;
        }
  return {worst < 1e-6, fmt("max|general-closed|=%.2e over %g points (%g inside Omega)", worst, compared, nonzero)};
}

Verdict three_atom_haar() {
  const auto t0 = Clock::now();
  const auto x0 = atomic_x0({{-1, 0.25}, {0, 0.5}, {1, 0.25}});
  // hole of the Haar model
  double hole_err = 0;
  bool hole_found = true;
  for (double th : {0.1, 0.7, 1.3, 1.9, 2.6, 3.0}) {
    const auto pts = omega_boundary_on_segment(RDiagonalSpec::haar(1), x0, 0.0, std::polar(0.9, th));
    if (pts.empty()) {
      hole_found = false;
      continue;
    }
    hole_err = std::max(hole_err, std::abs(std::norm(pts[0]) - 0.5));
  }
  // circular: 0 lies in Omega and every ray leaves Omega exactly once, so there is no hole
  bool no_hole = omega_membership(RDiagonalSpec::circular(1), x0, 0.0).in_omega;
  for (double th : {0.1, 0.7, 1.3, 1.6, 1.9, 2.6, 3.0})
    if (omega_boundary_on_segment(RDiagonalSpec::circular(1), x0, 0.0, std::polar(3.0, th)).size() != 1)
      no_hole = false;

  rmt::EnsembleSpec spec;
  spec.n = 300;
  spec.samples = 20;
  spec.seed = 7;
  spec.T = RDiagonalSpec::haar(1);
  spec.x0 = x0;
  GridSpec g{-1.6, 1.6, 24, -0.9, 0.9, 14};
  GridOptions go;
  go.subsample = 12;
  const auto theory = density_grid(spec.T, spec.x0, g, go);
  const auto emp = rmt::empirical_brown_density(spec, g);
  const auto rep = rmt::compare_report(theory, emp);
  const double secs = seconds_since(t0);
  return {hole_found && hole_err < 1e-6 && no_hole && rep.l1_distance < 0.15 && secs < 300,
          fmt("hole |r^2-0.5|=%.2e L1=%.4f time=%.1fs", hole_err, rep.l1_distance, secs) +
              (no_hole ? " circular-hole=empty" : " circular-hole=PRESENT")};
}

Verdict laplacian_consistency() {
  const auto T = RDiagonalSpec::circular(1);
  const auto x0 = atomic_x0({{-1, 0.5}, {1, 0.5}});
  const double t = 1e-4;
  // the support lies inside [-2.2, 2.2] x [-1.5, 1.5]; the grid includes the corners
  const int n = 61;
  const double xl = -2.4, xh = 2.4, yl = -1.6, yh = 1.6;
  const double hx = (xh - xl) / (n - 1), hy = (yh - yl) / (n - 1);
  std::vector<double> logd(n * n);
  std::vector<char> inside(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx l(xl + i * hx, yl + j * hy);
      const auto v = omega_membership(T, x0, l);
      inside[j * n + i] = v.margin_inner > kBoundaryMargin && v.margin_outer > kBoundaryMargin;
      logd[j * n + i] = fk_determinant(T, x0, l, t).log_value;
    }
  double worst = 0;
  int cells = 0;
  for (int j = 2; j < n - 2; ++j)
    for (int i = 2; i < n - 2; ++i) {
      bool interior = true;
      for (int dj = -2; dj <= 2 && interior; ++dj)
        for (int di = -2; di <= 2; ++di)
          if (!inside[(j + dj) * n + i + di]) interior = false;
      if (!interior) continue;
      const double lap = (logd[j * n + i + 1] - 2 * logd[j * n + i] + logd[j * n + i - 1]) / (hx * hx) +
                         (logd[(j + 1) * n + i] - 2 * logd[j * n + i] + logd[(j - 1) * n + i]) / (hy * hy);
      const double rho = brown_density(T, x0, cplx(xl + i * hx, yl + j * hy));
      worst = std::max(worst, std::abs(lap / (2 * M_PI) - rho));
      ++cells;
    }
  return {cells > 100 && worst < 1e-3, fmt("max|lap/(2pi)-rho|=%.2e over %g interior cells", worst, cells)};
}

Verdict property_suites() {
  int failed = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    if (!ok) ++failed;
  };
  const auto ms = fixtures::stored_measures();

  // s f(s) increasing, limits lambda1^2 at 0 and lambda2^2 at infinity
  for (const auto& [name, mu] : ms) {
    const auto lb = lambda_bounds(mu);
    const bool flat = lb.lambda1 == lb.lambda2;
    double prev = -1;
    for (double ls = -6; ls <= 6; ls += 0.25) {
      const double p = p_ratio(mu, std::pow(10.0, ls));
      expect(flat || p > prev);
      prev = p;
    }
    expect(std::abs(p_ratio(mu, 1e-7) - lb.lambda1 * lb.lambda1) <= 1e-4 * std::max(1.0, lb.lambda1 * lb.lambda1));
    if (std::isfinite(lb.lambda2))
      expect(std::abs(p_ratio(mu, 1e7) - lb.lambda2 * lb.lambda2) <= 1e-6 * lb.lambda2 * lb.lambda2);
    else
      expect(p_ratio(mu, 1e7) > 1e3);
  }

  // subordination identities and swap symmetry
  for (const auto& a : ms)
    for (const auto& b : ms)
      for (double t : {1e-3, 0.1, 1.0, 10.0}) {
        const auto p = solve_subordination(a.mu, b.mu, t);
        const double h = 1 / (p.s1 + p.s2 - t);
        expect(std::abs(h_transform(a.mu, p.s1) - h) <= 1e-10 * std::max(1.0, h));
        expect(std::abs(h_transform(b.mu, p.s2) - h) <= 1e-10 * std::max(1.0, h));
        const auto q = solve_subordination(b.mu, a.mu, t);
        expect(q.s1 == p.s2 && q.s2 == p.s1);
      }

  // conjugation symmetry for selfadjoint x0, rotation symmetry for x0 = 0
  const auto x0 = atomic_x0({{-1, 0.5}, {1, 0.5}});
  for (const auto& T : {RDiagonalSpec::haar(0.8), RDiagonalSpec::circular(1), RDiagonalSpec::circular_cauchy(1)})
    for (double re : {-1.7, -0.6, 0.4, 1.3})
      for (double im : {0.2, 0.9}) {
        const cplx l(re, im);
        const double a = brown_density(T, x0, l), b = brown_density(T, x0, std::conj(l));
        expect(std::abs(a - b) <= 1e-10 * std::max(1.0, a));
      }
  const auto power = RDiagonalSpec::circular_cauchy_power(3);
  for (double r : {0.3, 0.8, 1.4}) {
    const double ref = brown_density(power, OperatorModel::zero(), r);
    for (double th : {0.4, 1.9, 3.3, 5.0})
      expect(std::abs(brown_density(power, OperatorModel::zero(), std::polar(r, th)) - ref) <= 1e-10 * std::max(1.0, ref));
  }

  // RMT: unitarity and eigensolver residual
  rmt::Rng rng(11);
  for (int n : {20, 80}) {
    const Eigen::MatrixXcd u = rmt::sample_haar_unitary(n, rng);
    expect((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12 * n);
    const Eigen::MatrixXcd g = rmt::ginibre(n, rng);
    const auto e = rmt::jacobi_eigensolver(g.adjoint() * g);
    expect(e.residual <= 1e-10);
  }
  return {failed == 0, fmt("%g/%g checks on %g stored measures", checks - failed, checks, double(ms.size()))};
}

}  // namespace

int main() {
  criterion(1, "circular law reduction", circular_law);
  criterion(2, "circular Cauchy closed form", circular_cauchy);
  criterion(3, "Cauchy subordination", cauchy_subordination);
  criterion(4, "semicircle pair at t = 0", semicircle_pair);
  criterion(5, "boundary asymptotics", boundary_asymptotics);
  criterion(6, "Haar determinant", haar_determinant);
  criterion(7, "general vs closed-form densities", oracle_agreement);
  criterion(8, "three-atom Haar model", three_atom_haar);
  criterion(9, "Laplacian consistency", laplacian_consistency);
  criterion(10, "property suites", property_suites);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
