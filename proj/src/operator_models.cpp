#include "brownkit/operator_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "brownkit/errors.hpp"

namespace brownkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& x, cplx lambda) {
  Eigen::MatrixXcd a = x;
  a.diagonal().array() -= lambda;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
}

double zero_threshold(const Eigen::MatrixXcd& x) { return 1e-10 * std::max(1.0, x.norm()); }

}  // namespace

// ---------------- OperatorModel ----------------

OperatorModel OperatorModel::zero() { return selfadjoint(RealMeasure::dirac(0.0)); }

OperatorModel OperatorModel::selfadjoint(RealMeasure spectrum) {
  OperatorModel m;
  m.v_ = std::move(spectrum);
  return m;
}

OperatorModel OperatorModel::normal(std::vector<NormalAtom> atoms) {
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.z.real()) || !std::isfinite(a.z.imag()) || !(a.mass > 0))
      throw MalformedMeasureError("normal atom needs a finite location and positive mass");
    total += a.mass;
  }
  if (atoms.empty() || std::abs(total - 1.0) > 1e-8) throw MalformedMeasureError("atom masses must sum to 1");
  // merge coincident eigenvalues
  std::vector<NormalAtom> merged;
  for (const auto& a : atoms) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const NormalAtom& b) {
      return std::abs(b.z - a.z) <= 1e-12 * std::max(1.0, std::abs(a.z));
    });
    if (it != merged.end()) it->mass += a.mass;
    else merged.push_back(a);
  }
  OperatorModel m;
  m.v_ = std::move(merged);
  return m;
}

OperatorModel OperatorModel::matrix(Eigen::MatrixXcd x) {
  if (x.rows() < 1 || x.rows() != x.cols()) throw ShapeError("matrix model must be square with N >= 1");
  if (!x.allFinite()) throw MalformedMeasureError("matrix model has non-finite entries");
  OperatorModel m;
  m.v_ = std::move(x);
  return m;
}

OperatorModel::Kind OperatorModel::kind() const {
  switch (v_.index()) {
    case 0: return Kind::selfadjoint;
    case 1: return Kind::normal;
    default: return Kind::matrix;
  }
}

const RealMeasure& OperatorModel::spectrum() const { return std::get<RealMeasure>(v_); }
const std::vector<NormalAtom>& OperatorModel::normal_atoms() const { return std::get<std::vector<NormalAtom>>(v_); }
const Eigen::MatrixXcd& OperatorModel::matrix() const { return std::get<Eigen::MatrixXcd>(v_); }

std::vector<NormalAtom> OperatorModel::eigenvalue_atoms() const {
  switch (kind()) {
    case Kind::selfadjoint: {
      std::vector<NormalAtom> out;
      for (const auto& a : spectrum().atoms()) out.push_back({cplx(a.x, 0.0), a.mass});
      return out;
    }
    case Kind::normal: return normal_atoms();
    case Kind::matrix: {
      // eigenvalue locations from Eigen, weights from the kernel dimension
      const auto& x = matrix();
      const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(x, false).eigenvalues();
      std::vector<NormalAtom> out;
      const double n = double(x.rows());
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const cplx z = ev[i];
        if (std::any_of(out.begin(), out.end(),
                        [&](const NormalAtom& a) { return std::abs(a.z - z) <= 1e-8 * std::max(1.0, std::abs(z)); }))
          continue;
        const Eigen::VectorXd sv = singular_values(x, z);
        const double nullity = double((sv.array() <= 1e-8 * std::max(1.0, x.norm())).count());
        if (nullity > 0) out.push_back({z, nullity / n});
      }
      return out;
    }
  }
  return {};
}

double OperatorModel::second_moment_about(cplx lambda) const {
  switch (kind()) {
    case Kind::selfadjoint:
      return spectrum().shifted_second_moment(lambda.real()) + lambda.imag() * lambda.imag();
    case Kind::normal: {
      double acc = 0.0;
      for (const auto& a : normal_atoms()) acc += a.mass * std::norm(a.z - lambda);
      return acc;
    }
    case Kind::matrix: {
      Eigen::MatrixXcd a = matrix();
      a.diagonal().array() -= lambda;
      return a.squaredNorm() / double(a.rows());
    }
  }
  return 0.0;
}

double OperatorModel::inverse_second_moment_about(cplx lambda) const {
  switch (kind()) {
    case Kind::selfadjoint: return spectrum().shifted_inverse_square(lambda.real(), lambda.imag());
    case Kind::normal: {
      double acc = 0.0;
      for (const auto& a : normal_atoms()) {
        const double q = std::norm(a.z - lambda);
        if (q == 0.0) return kInf;
        acc += a.mass / q;
      }
      return acc;
    }
    case Kind::matrix: {
      const Eigen::VectorXd sv = singular_values(matrix(), lambda);
      const double thr = zero_threshold(matrix()) * 1e-4;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] <= thr) return kInf;
        acc += 1.0 / (sv[i] * sv[i]);
      }
      return acc / double(sv.size());
    }
  }
  return 0.0;
}

PositiveMeasure modulus_distribution(const OperatorModel& x0, cplx lambda) {
  switch (x0.kind()) {
    case OperatorModel::Kind::selfadjoint:
      return PositiveMeasure::shifted_modulus(x0.spectrum(), lambda.real(), lambda.imag());
    case OperatorModel::Kind::normal: {
      std::vector<Atom> atoms;
      for (const auto& a : x0.normal_atoms()) atoms.push_back({std::abs(a.z - lambda), a.mass});
      double total = 0.0;
      for (const auto& a : atoms) total += a.mass;
      for (auto& a : atoms) a.mass /= total;
      return PositiveMeasure::atomic(std::move(atoms));
    }
    case OperatorModel::Kind::matrix: {
      const Eigen::VectorXd sv = singular_values(x0.matrix(), lambda);
      const double thr = zero_threshold(x0.matrix()) * 1e-4;
      std::vector<Atom> atoms;
      const double w = 1.0 / double(sv.size());
      for (Eigen::Index i = 0; i < sv.size(); ++i) atoms.push_back({sv[i] <= thr ? 0.0 : sv[i], w});
      return PositiveMeasure::atomic(std::move(atoms));
    }
  }
  throw DomainError("unknown operator model");
}

ResolventFunctionals resolvent_functionals(const OperatorModel& x0, cplx lambda, double s) {
  if (!(s >= 0) || !std::isfinite(s)) throw DomainError("resolvent needs s >= 0");
  ResolventFunctionals r;
  switch (x0.kind()) {
    case OperatorModel::Kind::selfadjoint: {
      const auto& nu = x0.spectrum();
      const double a = lambda.real(), b = lambda.imag();
      const double sigma = std::hypot(b, s);
      if (nu.is_atomic()) {
        // direct sums; handles sigma = 0 away from the atoms
        for (const auto& at : nu.atoms()) {
          const double v = at.x - a, q = v * v + sigma * sigma;
          if (q == 0.0) throw SingularityError("h is singular: lambda is an eigenvalue and s = 0");
          r.phi_hinv += at.mass / q;
          r.phi_hinv2 += at.mass / (q * q);
          r.phi_x_hinv += at.mass * cplx(-v, -b) / q;
          r.phi_x_hinv2 += at.mass * cplx(-v, b) / (q * q);
        }
      } else {
        if (sigma == 0.0) throw SingularityError("h is singular on the real support with s = 0");
        const auto k = nu.shifted_kernels(a, sigma);
        r.phi_hinv = k.d;
        r.phi_hinv2 = k.e;
        r.phi_x_hinv = cplx(-k.xd, -b * k.d);
        r.phi_x_hinv2 = cplx(-k.xe, b * k.e);
      }
      r.phi_hk = r.phi_hinv2;
      return r;
    }
    case OperatorModel::Kind::normal: {
      for (const auto& at : x0.normal_atoms()) {
        const cplx w = lambda - at.z;
        const double q = std::norm(w) + s * s;
        if (q == 0.0) throw SingularityError("h is singular: lambda is an eigenvalue and s = 0");
        r.phi_hinv += at.mass / q;
        r.phi_hinv2 += at.mass / (q * q);
        r.phi_x_hinv += at.mass * std::conj(w) / q;
        r.phi_x_hinv2 += at.mass * w / (q * q);
      }
      r.phi_hk = r.phi_hinv2;
      return r;
    }
    case OperatorModel::Kind::matrix: {
      const auto& x = x0.matrix();
      const Eigen::Index n = x.rows();
      Eigen::MatrixXcd a = -x;
      a.diagonal().array() += lambda;
      const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
      Eigen::MatrixXcd h = a.adjoint() * a + s * s * id;
      Eigen::MatrixXcd k = a * a.adjoint() + s * s * id;
      Eigen::LLT<Eigen::MatrixXcd> lh(h), lk(k);
      if (lh.info() != Eigen::Success || lk.info() != Eigen::Success)
        throw SingularityError("h is singular at this (lambda, s)");
      const Eigen::MatrixXcd hinv = lh.solve(id);
      const Eigen::MatrixXcd kinv = lk.solve(id);
      const Eigen::MatrixXcd hinv2 = hinv * hinv;
      if (!hinv.allFinite() || hinv.diagonal().real().minCoeff() <= 0)
        throw SingularityError("h is numerically singular at this (lambda, s)");
      const double dn = double(n);
      r.phi_hinv = hinv.trace().real() / dn;
      r.phi_hinv2 = hinv2.trace().real() / dn;
      r.phi_hk = (hinv * kinv).trace().real() / dn;
      r.phi_x_hinv = (a.adjoint() * hinv).trace() / dn;
      r.phi_x_hinv2 = (a * hinv2).trace() / dn;
      return r;
    }
  }
  return r;
}

// ---------------- RDiagonalSpec ----------------

RDiagonalSpec RDiagonalSpec::general(PositiveMeasure modulus) {
  if (modulus.mass_at_zero() >= 1.0) throw UnsupportedMeasureError("T = 0 is not a valid R-diagonal spec");
  return RDiagonalSpec(GeneralRDiagonal{modulus}, modulus);
}

RDiagonalSpec RDiagonalSpec::haar(double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("Haar scale must be positive");
  return RDiagonalSpec(HaarUnitary{gamma}, PositiveMeasure::dirac(gamma));
}

RDiagonalSpec RDiagonalSpec::circular(double variance) {
  return RDiagonalSpec(Circular{variance}, PositiveMeasure::quarter_circle(variance));
}

RDiagonalSpec RDiagonalSpec::circular_cauchy(double scale) {
  return RDiagonalSpec(CircularCauchy{scale}, PositiveMeasure::cauchy_modulus(scale));
}

RDiagonalSpec RDiagonalSpec::circular_cauchy_power(int n) {
  return RDiagonalSpec(CircularCauchyPower{n}, PositiveMeasure::cauchy_power_modulus(n));
}

std::string RDiagonalSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, HaarUnitary>) os << "haar:" << v.gamma;
        else if constexpr (std::is_same_v<V, Circular>) os << "circular:" << v.variance;
        else if constexpr (std::is_same_v<V, CircularCauchy>) os << "cauchy:" << v.scale;
        else if constexpr (std::is_same_v<V, CircularCauchyPower>) os << "cauchy-power:" << v.power;
        else os << "general";
      },
      v_);
  return os.str();
}

SymmetricMeasure rdiag_symmetrized_modulus(const RDiagonalSpec& T) { return symmetrize(T.modulus()); }

double psi_transform(const PositiveMeasure& modulus, double z) {
  if (!(z < 0)) throw DomainError("psi is evaluated on the negative axis");
  // psi(-1/s^2) = -E[u^2/(s^2+u^2)]
  return -modulus.kernels(1.0 / std::sqrt(-z)).n;
}

double s_transform(const PositiveMeasure& modulus, double z) {
  const double m0 = modulus.mass_at_zero();
  if (!(z < 0 && z > m0 - 1)) throw DomainError("S-transform argument outside (mu({0}) - 1, 0)");
  // chi(z) = -1/s^2 where psi(-1/s^2) = z; psi is monotone in s.
  auto g = [&](double s) { return psi_transform(modulus, -1.0 / (s * s)) - z; };
  double lo = 1.0, hi = 1.0;
  while (g(lo) >= 0) {
    lo *= 0.5;
    if (lo < 1e-200) throw SolverFailure("psi inversion failed", lo, hi, 0);
  }
  while (g(hi) <= 0) {
    hi *= 2.0;
    if (hi > 1e200) throw SolverFailure("psi inversion failed", lo, hi, 0);
  }
  boost::uintmax_t it = 200;
  const auto root = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  const double s = 0.5 * (root.first + root.second);
  const double chi = -1.0 / (s * s);
  return (z + 1) / z * chi;
}

double radial_cdf(const RDiagonalSpec& T, double r) {
  if (!(r > 0) || std::isnan(r)) throw DomainError("radial_cdf needs r > 0");
  const auto& v = T.variant();
  if (auto* h = std::get_if<HaarUnitary>(&v)) return r >= h->gamma ? 1.0 : 0.0;
  if (auto* c = std::get_if<Circular>(&v)) return std::min(1.0, r * r / c->variance);
  if (auto* c = std::get_if<CircularCauchy>(&v)) return r * r / (r * r + c->scale * c->scale);
  if (auto* c = std::get_if<CircularCauchyPower>(&v)) {
    const double w = std::pow(r, 2.0 / c->power);
    return w / (1 + w);
  }

  const auto& mod = T.modulus();
  const auto lb = lambda_bounds(mod.law());
  if (r < lb.lambda1) return 0.0;
  if (r >= lb.lambda2) return 1.0;
  // 1 + S^{-1}(r^-2): S(-n(s)) = d(s)/n(s) = 1/p(s), so solve p(s) = r^2 and
  // return 1 - n(s) = s h(s).
  const double r2 = r * r;
  auto g = [&](double s) { return transforms(mod.law(), s).p - r2; };
  double lo = 1.0, hi = 1.0;
  while (g(lo) >= 0) {
    lo *= 0.25;
    if (lo < 1e-150) return mod.mass_at_zero();
  }
  while (g(hi) <= 0) {
    hi *= 4.0;
    if (hi > 1e150) return 1.0;
  }
  boost::uintmax_t it = 200;
  const auto root = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
  const double s = 0.5 * (root.first + root.second);
  return transforms(mod.law(), s).h * s;
}

}  // namespace brownkit
