#include "brownkit/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "brownkit/errors.hpp"

namespace brownkit::rmt {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <class F>
void parallel_rows(int rows, int threads, F&& body) {
  const int nt = std::max(1, std::min(resolve_thread_count(threads), rows));
  if (nt == 1) {
    for (int j = 0; j < rows; ++j) body(j);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      for (int j = w; j < rows; j += nt) body(j);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) { return Rng(mix(seed ^ mix(index))); }

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2 * std::log(uniform()));
  const double th = 2 * kPi * uniform();
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

cplx Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return cplx(re, im) * std::sqrt(0.5);
}

Eigen::MatrixXcd ginibre(int n, Rng& rng) {
  Eigen::MatrixXcd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.complex_normal();
  return g;
}

Eigen::MatrixXcd sample_haar_unitary(int n, Rng& rng) {
  if (n < 1) throw DomainError("unitary size must be positive");
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre(n, rng));
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  const double err = (q.adjoint() * q - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > 1e-12) throw NumericalDegeneracyError("sampled unitary fails the unitarity check");
  return q;
}

void EnsembleSpec::validate() const {
  if (n < 2) throw ConfigError("ensemble size n must be at least 2");
  if (samples < 1) throw ConfigError("ensemble needs at least one sample");
  if (!(t_reg > 0) || !std::isfinite(t_reg)) throw ConfigError("t_reg must be positive");
}

Eigen::MatrixXcd realize_x0(const OperatorModel& x0, int n, double* imbalance) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  double imb = 0;
  switch (x0.kind()) {
    case OperatorModel::Kind::selfadjoint: {
      const auto& nu = x0.spectrum();
      for (int i = 0; i < n; ++i) out(i, i) = nu.quantile((i + 0.5) / n);
      for (const auto& a : nu.atoms()) {
        int count = 0;
        for (int i = 0; i < n; ++i) count += out(i, i).real() == a.x;
        imb += std::abs(double(count) / n - a.mass);
      }
      break;
    }
    case OperatorModel::Kind::normal: {
      // largest remainder
      const auto& atoms = x0.normal_atoms();
      std::vector<int> counts(atoms.size());
      std::vector<double> frac(atoms.size());
      int used = 0;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double want = atoms[k].mass * n;
        counts[k] = int(std::floor(want));
        frac[k] = want - counts[k];
        used += counts[k];
      }
      std::vector<std::size_t> order(atoms.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
      for (std::size_t k = 0; used < n; ++k, ++used) ++counts[order[k % order.size()]];
      int i = 0;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        for (int c = 0; c < counts[k]; ++c, ++i) out(i, i) = atoms[k].z;
        imb += std::abs(double(counts[k]) / n - atoms[k].mass);
      }
      break;
    }
    case OperatorModel::Kind::matrix: {
      const auto& m = x0.matrix();
      const int b = int(m.rows());
      if (n % b != 0) throw ShapeError("matrix model size must divide the ensemble size");
      for (int k = 0; k < n / b; ++k) out.block(k * b, k * b, b, b) = m;
      break;
    }
  }
  if (imbalance) *imbalance = imb;
  return out;
}

Realization realize_model(const EnsembleSpec& spec, Rng& rng) {
  spec.validate();
  const int n = spec.n;
  Realization r;
  r.x = realize_x0(spec.x0, n, &r.imbalance);

  const auto& T = spec.T;
  if (T.is<HaarUnitary>()) {
    r.x += T.as<HaarUnitary>().gamma * sample_haar_unitary(n, rng);
  } else if (T.is<Circular>()) {
    r.x += std::sqrt(T.as<Circular>().variance / n) * ginibre(n, rng);
  } else if (T.is<CircularCauchy>()) {
    const Eigen::MatrixXcd g1 = ginibre(n, rng);
    const Eigen::MatrixXcd g2 = ginibre(n, rng);
    // a g1 g2^{-1} through a solve on the transposed system
    const Eigen::MatrixXcd y = g2.transpose().partialPivLu().solve(g1.transpose()).transpose();
    r.x += T.as<CircularCauchy>().scale * y;
  } else {
    const auto& mod = T.modulus();
    Eigen::VectorXcd sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = mod.quantile(spec.stochastic_sigma ? rng.uniform() : (i + 0.5) / n);
    const Eigen::MatrixXcd u = sample_haar_unitary(n, rng);
    const Eigen::MatrixXcd v = sample_haar_unitary(n, rng);
    r.x += u * sigma.asDiagonal() * v;
  }
  return r;
}

HermitizedLogdet::HermitizedLogdet(const Eigen::MatrixXcd& x) : x_(x) {
  if (x.rows() != x.cols() || x.rows() < 1) throw ShapeError("hermitized_logdet needs a square matrix");
  xx_ = x.adjoint() * x;
}

double HermitizedLogdet::operator()(cplx lambda, double t) const {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("hermitized_logdet needs t > 0");
  // (X - l)^*(X - l) + t^2 = X^*X - conj(l) X - l X^* + (|l|^2 + t^2), lower triangle only
  const Eigen::Index n = x_.rows();
  Eigen::MatrixXcd a(n, n);
  const cplx lc = std::conj(lambda);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i) a(i, j) = xx_(i, j) - lc * x_(i, j) - lambda * std::conj(x_(j, i));
  a.diagonal().array() += std::norm(lambda) + t * t;
  const Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalDegeneracyError("Cholesky failed on the hermitized matrix");
  return llt.matrixLLT().diagonal().real().array().log().sum() / double(n);
}

double hermitized_logdet(const Eigen::MatrixXcd& x, cplx lambda, double t, LogdetMethod method) {
  if (!(t > 0) || !std::isfinite(t)) throw DomainError("hermitized_logdet needs t > 0");
  if (x.rows() != x.cols() || x.rows() < 1) throw ShapeError("hermitized_logdet needs a square matrix");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXcd b = x;
  b.diagonal().array() -= lambda;

  if (method == LogdetMethod::cholesky) return HermitizedLogdet(x)(lambda, t);

  const Eigen::MatrixXcd a = b.adjoint() * b;
  const auto eig = jacobi_eigensolver(a);
  if (eig.residual > 1e-10) throw NumericalDegeneracyError("Jacobi residual above 1e-10 ||A||");
  const double tr = a.trace().real();
  if (std::abs(eig.values.sum() - tr) > 1e-10 * std::max(1.0, a.norm()) * double(n))
    throw NumericalDegeneracyError("Jacobi eigenvalues do not sum to the trace");
  double acc = 0;
  for (Eigen::Index i = 0; i < n; ++i) acc += std::log(std::max(eig.values[i], 0.0) + t * t);
  return acc / (2.0 * double(n));
}

EmpiricalGrid empirical_brown_density(const EnsembleSpec& spec, const GridSpec& grid, int threads) {
  spec.validate();
  grid.validate();
  // one ring of extra nodes for the stencil
  const int ex = grid.nx + 2, ey = grid.ny + 2;
  std::vector<double> acc(std::size_t(ex) * ey, 0.0);

  EmpiricalGrid out;
  out.grid = grid;
  for (int k = 0; k < spec.samples; ++k) {
    Rng rng = Rng::stream(spec.seed, std::uint64_t(k));
    const auto r = realize_model(spec, rng);
    if (k == 0) out.imbalance = r.imbalance;
    const HermitizedLogdet logdet(r.x);
    parallel_rows(ey, threads, [&](int jj) {
      for (int ii = 0; ii < ex; ++ii) {
        const cplx lambda(grid.x(ii - 1), grid.y(jj - 1));
        acc[std::size_t(jj) * ex + ii] += logdet(lambda, spec.t_reg);
      }
    });
  }
  for (auto& v : acc) v /= spec.samples;

  // logdet is log Delta(X - lambda) regularized, so the Brown density is (1/2 pi) times its Laplacian
  const double hx = grid.dx(), hy = grid.dy();
  out.values.assign(grid.size(), 0.0);
  double mass = 0, clamped = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      auto at = [&](int di, int dj) { return acc[std::size_t(j + 1 + dj) * ex + (i + 1 + di)]; };
      const double c = at(0, 0);
      const double lap = (at(1, 0) + at(-1, 0) - 2 * c) / (hx * hx) + (at(0, 1) + at(0, -1) - 2 * c) / (hy * hy);
      double rho = lap / (2 * kPi);
      if (rho < 0) {
        clamped -= rho;
        rho = 0;
      }
      out.values[std::size_t(j) * grid.nx + i] = rho;
      mass += rho;
    }
  out.mass = mass * grid.cell_area();
  out.clamped_mass = clamped * grid.cell_area();
  return out;
}

ComparisonReport compare_report(const BrownDensityGrid& theory, const EmpiricalGrid& empirical) {
  const auto& a = theory.grid;
  const auto& b = empirical.grid;
  if (a.nx != b.nx || a.ny != b.ny || a.x_lo != b.x_lo || a.x_hi != b.x_hi || a.y_lo != b.y_lo || a.y_hi != b.y_hi ||
      theory.values.size() != empirical.values.size())
    throw ShapeError("comparison needs identical grids");
  ComparisonReport r;
  r.residuals.resize(theory.values.size());
  double l1 = 0;
  for (std::size_t k = 0; k < theory.values.size(); ++k) {
    const double d = theory.values[k] - empirical.values[k];
    r.residuals[k] = d;
    l1 += std::abs(d);
    r.max_abs = std::max(r.max_abs, std::abs(d));
  }
  r.l1_distance = l1 * a.cell_area();
  r.mass_theory = theory.total_mass_estimate;
  r.mass_empirical = empirical.mass;
  return r;
}

}  // namespace brownkit::rmt
