#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "brownkit/operator_models.hpp"
#include "brownkit/subordination.hpp"

namespace brownkit {

struct DomainVerdict {
  bool in_omega = false;
  double margin_inner = 0;  // ||(x0 - lambda)^-1||_2 ||T||_2 - 1
  double margin_outer = 0;  // ||x0 - lambda||_2 ||T^-1||_2 - 1
  bool atom_candidate = false;
};

// Margins at or below this count as outside the open set.
inline constexpr double kBoundaryMargin = 1e-6;

DomainVerdict omega_membership(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda);
std::vector<cplx> atom_candidates(const RDiagonalSpec& T, const OperatorModel& x0);

struct FkDeterminant {
  double value = 0;      // Delta(|x0 + T - lambda|^2 + t^2)^(1/2)
  double log_value = 0;
  BoundaryCase boundary = BoundaryCase::finite_finite;  // meaningful for t = 0
  bool atom_dominated = false;
};

FkDeterminant fk_determinant(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda, double t);

enum class DensityRoute { automatic, general, closed_form };

double brown_density(const RDiagonalSpec& T, const OperatorModel& x0, cplx lambda,
                     DensityRoute route = DensityRoute::automatic);

// x0 selfadjoint, T circular of variance eps.
double circular_selfadjoint_density(const RealMeasure& x0, double eps, cplx lambda);

struct RingRadii {
  double r_inner = 0;
  double r_outer = 0;
  double r_inner_raw = 0;  // lambda1^2 - lambda2^2 as a squared quantity
};

RingRadii ring_radii(const RDiagonalSpec& T1, const RDiagonalSpec& T2);

// Cell-centred rectangular lattice.
struct GridSpec {
  double x_lo = -1, x_hi = 1;
  int nx = 2;
  double y_lo = -1, y_hi = 1;
  int ny = 2;

  double dx() const { return (x_hi - x_lo) / nx; }
  double dy() const { return (y_hi - y_lo) / ny; }
  double x(int i) const { return x_lo + (i + 0.5) * dx(); }
  double y(int j) const { return y_lo + (j + 0.5) * dy(); }
  double cell_area() const { return dx() * dy(); }
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  void validate() const;
};

enum CellFlag : std::uint8_t { kInOmega = 1, kAtomCandidate = 2, kFailed = 4 };

// Row-major values: index j * nx + i, y increasing with j.
struct BrownDensityGrid {
  GridSpec grid;
  std::vector<double> values;
  std::vector<std::uint8_t> flags;
  std::vector<cplx> atom_candidates;  // masses are not assigned
  double total_mass_estimate = 0;
  int failed_cells = 0;
};

struct GridOptions {
  int threads = 0;  // 0: BROWNKIT_THREADS or 1
  DensityRoute route = DensityRoute::automatic;
  int subsample = 1;  // k > 1: each value averages a k x k midpoint lattice inside the cell
};

BrownDensityGrid density_grid(const RDiagonalSpec& T, const OperatorModel& x0, const GridSpec& grid,
                              const GridOptions& options = {});

// Omega membership for x0 semicircular of variance t.
bool ellipse_boundary_check(const RDiagonalSpec& T, double t, cplx lambda);

// Points where Omega membership flips along the segment a -> b, located to
// near machine precision.
std::vector<cplx> omega_boundary_on_segment(const RDiagonalSpec& T, const OperatorModel& x0, cplx a, cplx b,
                                            int samples = 400);

int resolve_thread_count(int requested);

}  // namespace brownkit
