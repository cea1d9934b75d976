#include <cmath>
#include <limits>

#include "brownkit/errors.hpp"
#include "brownkit/rmt.hpp"

namespace brownkit::rmt {

HermitianEigen jacobi_eigensolver(const Eigen::MatrixXcd& a_in, int max_sweeps) {
  const Eigen::Index n = a_in.rows();
  if (n != a_in.cols()) throw ShapeError("Jacobi needs a square matrix");
  Eigen::MatrixXcd a = 0.5 * (a_in + a_in.adjoint());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  auto off_norm2 = [&] {
    double acc = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) acc += std::norm(a(i, j));
    return 2 * acc;
  };

  HermitianEigen out;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (std::sqrt(off_norm2()) <= 1e-13 * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double g = std::abs(apq);
        if (g <= 1e-300 || g <= 1e-18 * scale) continue;
        const cplx ph = apq / g;  // e^{i phi}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = (aqq - app) / (2 * g);
        const double tt = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(tt * tt + 1), s = tt * c;
        // J = diag(1, conj(ph)) * [[c, s], [-s, c]] on (p, q)
        const cplx jpp = c, jpq = s, jqp = -s * std::conj(ph), jqq = c * std::conj(ph);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = a(q, p) = 0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
  }
  if (std::sqrt(off_norm2()) > 1e-13 * scale)
    throw SolverFailure("Jacobi eigensolver did not converge", 0, std::sqrt(off_norm2()), sweep);

  out.values = a.diagonal().real();
  out.vectors = std::move(v);
  out.sweeps = sweep;
  const Eigen::MatrixXcd r = a_in * out.vectors - out.vectors * out.values.asDiagonal();
  out.residual = r.colwise().norm().maxCoeff() / scale;
  return out;
}

}  // namespace brownkit::rmt
