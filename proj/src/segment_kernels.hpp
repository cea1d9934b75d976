#pragma once

// Integrals of a linear density piece against the rational kernels in
// 1/(sigma^2 + v^2).  The piece runs over v in [v0, v1] with values y0, y1 at
// the ends.  Near the pole the antiderivatives are used; far from it a fixed
// Gauss-Legendre rule is both cheaper and free of cancellation.

namespace brownkit::detail {

struct SegmentKernels {
  double d = 0;   // 1/q
  double e = 0;   // 1/q^2
  double n = 0;   // v^2/q
  double m = 0;   // v^2/q^2
  double xd = 0;  // v/q
  double xe = 0;  // v/q^2
};

// q = sigma^2 + v^2, sigma > 0.
SegmentKernels segment_kernels(double v0, double v1, double y0, double y1, double sigma);

// Integral of rho(v) log(sigma^2 + v^2); sigma >= 0.
double segment_log(double v0, double v1, double y0, double y1, double sigma);

// Integral of rho(v)/v^2; +inf when the piece touches 0 with positive density.
double segment_inverse_square(double v0, double v1, double y0, double y1);

double segment_mass(double v0, double v1, double y0, double y1);
double segment_second_moment(double v0, double v1, double y0, double y1);

// Mass of the piece on [v0, x], x inside the piece.
double segment_partial_mass(double v0, double v1, double y0, double y1, double x);

}  // namespace brownkit::detail
