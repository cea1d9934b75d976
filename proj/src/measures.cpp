#include "brownkit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "brownkit/errors.hpp"
#include "laws.hpp"
#include "segment_kernels.hpp"

namespace brownkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassTol = 1e-8;

bool same_point(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }

std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  std::vector<Atom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && same_point(out.back().x, a.x)) out.back().mass += a.mass;
    else out.push_back(a);
  }
  return out;
}

// (2/pi) int f(c + 2 sqrt(eps) sin th) cos^2 th dth over [-pi/2, pi/2], split
// where the argument crosses `a` so that peaked integrands are resolved.
template <class F>
double semicircle_integral(double c, double eps, double a, F f) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double r = 2 * std::sqrt(eps);
  auto g = [&](double th) {
    const double cs = std::cos(th);
    return f(c + r * std::sin(th)) * cs * cs;
  };
  const double lo = -std::numbers::pi / 2, hi = std::numbers::pi / 2;
  double total;
  if (std::abs(a - c) < r) {
    const double mid = std::asin((a - c) / r);
    total = GK::integrate(g, lo, mid, 20, 1e-13) + GK::integrate(g, mid, hi, 20, 1e-13);
  } else {
    total = GK::integrate(g, lo, hi, 20, 1e-13);
  }
  return 2 * total / std::numbers::pi;
}

double semicircle_cdf(double c, double eps, double x) {
  const double y = std::clamp((x - c) / std::sqrt(eps), -2.0, 2.0);
  return 0.5 + y * std::sqrt(4 - y * y) / (4 * std::numbers::pi) + std::asin(y / 2) / std::numbers::pi;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw MalformedMeasureError(std::string("non-finite ") + what);
}

}  // namespace

// ---------------- RealMeasure ----------------

RealMeasure RealMeasure::from_parts(std::vector<Atom> atoms, std::vector<DensityPiece> pieces) {
  RealMeasure r;
  double total = 0.0;
  for (const auto& a : atoms) {
    check_finite(a.x, "atom location");
    check_finite(a.mass, "atom mass");
    if (!(a.mass > 0.0)) throw MalformedMeasureError("atom mass must be positive");
    total += a.mass;
  }
  for (const auto& p : pieces) {
    if (p.grid.size() < 2 || p.grid.size() != p.values.size())
      throw MalformedMeasureError("density piece needs matching grid/values of length >= 2");
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
      check_finite(p.grid[i], "grid point");
      check_finite(p.values[i], "density value");
      if (p.values[i] < 0) throw MalformedMeasureError("negative density value");
      if (i > 0 && !(p.grid[i] > p.grid[i - 1])) throw MalformedMeasureError("grid must increase");
      if (i > 0) total += detail::segment_mass(p.grid[i - 1], p.grid[i], p.values[i - 1], p.values[i]);
    }
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw MalformedMeasureError("total mass " + std::to_string(total) + " differs from 1");
  r.atoms_ = merge_atoms(std::move(atoms));
  r.pieces_ = std::move(pieces);
  return r;
}

RealMeasure RealMeasure::dirac(double x) { return from_parts({{x, 1.0}}, {}); }

RealMeasure RealMeasure::semicircle(double center, double variance) {
  if (!(variance > 0) || !std::isfinite(variance) || !std::isfinite(center))
    throw DomainError("semicircle needs finite center and positive variance");
  RealMeasure r;
  r.semi_ = Semi{center, variance};
  return r;
}

RealMeasure::Shifted RealMeasure::shifted_kernels(double a, double sigma) const {
  Shifted k{0, 0, 0, 0, 0, 0};
  const double s2 = sigma * sigma;
  for (const auto& at : atoms_) {
    const double v = at.x - a, q = s2 + v * v, w = at.mass / q;
    k.d += w;
    k.e += w / q;
    k.n += w * v * v;
    k.m += w * v * v / q;
    k.xd += w * v;
    k.xe += w * v / q;
  }
  for (const auto& p : pieces_) {
    for (std::size_t i = 1; i < p.grid.size(); ++i) {
      const auto sk = detail::segment_kernels(p.grid[i - 1] - a, p.grid[i] - a, p.values[i - 1],
                                              p.values[i], sigma);
      k.d += sk.d;
      k.e += sk.e;
      k.n += sk.n;
      k.m += sk.m;
      k.xd += sk.xd;
      k.xe += sk.xe;
    }
  }
  if (semi_) {
    const double c = semi_->center, eps = semi_->variance;
    auto I = [&](auto f) { return semicircle_integral(c, eps, a, f); };
    k.d = I([&](double u) { return 1.0 / (s2 + (u - a) * (u - a)); });
    k.e = I([&](double u) { const double q = s2 + (u - a) * (u - a); return 1.0 / (q * q); });
    k.n = I([&](double u) { const double v = u - a; return v * v / (s2 + v * v); });
    k.m = I([&](double u) { const double v = u - a, q = s2 + v * v; return v * v / (q * q); });
    k.xd = I([&](double u) { const double v = u - a; return v / (s2 + v * v); });
    k.xe = I([&](double u) { const double v = u - a, q = s2 + v * v; return v / (q * q); });
  }
  return k;
}

double RealMeasure::shifted_log(double a, double sigma) const {
  const double s2 = sigma * sigma;
  double acc = 0.0;
  for (const auto& at : atoms_) {
    const double v = at.x - a;
    const double q = s2 + v * v;
    if (q == 0.0) return -kInf;
    acc += at.mass * std::log(q);
  }
  for (const auto& p : pieces_)
    for (std::size_t i = 1; i < p.grid.size(); ++i)
      acc += detail::segment_log(p.grid[i - 1] - a, p.grid[i] - a, p.values[i - 1], p.values[i], sigma);
  if (semi_)
    acc = semicircle_integral(semi_->center, semi_->variance, a, [&](double u) {
      const double v = u - a;
      return std::log(s2 + v * v);
    });
  return acc;
}

double RealMeasure::shifted_inverse_square(double a, double b) const {
  const double b2 = b * b;
  double acc = 0.0;
  for (const auto& at : atoms_) {
    const double v = at.x - a, q = b2 + v * v;
    if (q == 0.0) return kInf;
    acc += at.mass / q;
  }
  for (const auto& p : pieces_) {
    for (std::size_t i = 1; i < p.grid.size(); ++i) {
      const double v0 = p.grid[i - 1] - a, v1 = p.grid[i] - a;
      if (b == 0.0) {
        const double r = detail::segment_inverse_square(v0, v1, p.values[i - 1], p.values[i]);
        if (std::isinf(r)) return kInf;
        acc += r;
      } else {
        acc += detail::segment_kernels(v0, v1, p.values[i - 1], p.values[i], std::abs(b)).d;
      }
    }
  }
  if (semi_) {
    const double c = semi_->center, r = 2 * std::sqrt(semi_->variance);
    if (b == 0.0 && std::abs(a - c) <= r) return kInf;
    acc = semicircle_integral(c, semi_->variance, a,
                              [&](double u) { return 1.0 / (b2 + (u - a) * (u - a)); });
  }
  return acc;
}

double RealMeasure::shifted_second_moment(double a) const {
  if (semi_) return semi_->variance + (semi_->center - a) * (semi_->center - a);
  double acc = 0.0;
  for (const auto& at : atoms_) acc += at.mass * (at.x - a) * (at.x - a);
  for (const auto& p : pieces_)
    for (std::size_t i = 1; i < p.grid.size(); ++i)
      acc += detail::segment_second_moment(p.grid[i - 1] - a, p.grid[i] - a, p.values[i - 1], p.values[i]);
  return acc;
}

double RealMeasure::mass_at(double a) const {
  double acc = 0.0;
  for (const auto& at : atoms_)
    if (same_point(at.x, a)) acc += at.mass;
  return acc;
}

double RealMeasure::mass_in(double lo, double hi) const {
  if (hi < lo) return 0.0;
  if (semi_) {
    return semicircle_cdf(semi_->center, semi_->variance, hi) -
           semicircle_cdf(semi_->center, semi_->variance, lo);
  }
  double acc = 0.0;
  for (const auto& at : atoms_)
    if ((at.x >= lo || same_point(at.x, lo)) && (at.x <= hi || same_point(at.x, hi))) acc += at.mass;
  for (const auto& p : pieces_) {
    for (std::size_t i = 1; i < p.grid.size(); ++i) {
      const double g0 = p.grid[i - 1], g1 = p.grid[i];
      if (hi <= g0 || lo >= g1) continue;
      const double y0 = p.values[i - 1], y1 = p.values[i];
      acc += detail::segment_partial_mass(g0, g1, y0, y1, std::min(hi, g1)) -
             detail::segment_partial_mass(g0, g1, y0, y1, std::max(lo, g0));
    }
  }
  return acc;
}

double RealMeasure::cdf(double x) const { return mass_in(-kInf, x); }

double RealMeasure::mean() const {
  if (semi_) return semi_->center;
  double acc = 0.0;
  for (const auto& at : atoms_) acc += at.mass * at.x;
  for (const auto& p : pieces_)
    for (std::size_t i = 1; i < p.grid.size(); ++i) {
      // linear density: integral of x rho(x) is exact via the two-point trapezoid correction
      const double g0 = p.grid[i - 1], g1 = p.grid[i], y0 = p.values[i - 1], y1 = p.values[i];
      acc += (g1 - g0) * (y0 * (2 * g0 + g1) + y1 * (g0 + 2 * g1)) / 6.0;
    }
  return acc;
}

double RealMeasure::variance() const { return shifted_second_moment(mean()); }

double RealMeasure::support_lo() const {
  if (semi_) return semi_->center - 2 * std::sqrt(semi_->variance);
  double lo = kInf;
  for (const auto& at : atoms_) lo = std::min(lo, at.x);
  for (const auto& p : pieces_) lo = std::min(lo, p.grid.front());
  return lo;
}

double RealMeasure::support_hi() const {
  if (semi_) return semi_->center + 2 * std::sqrt(semi_->variance);
  double hi = -kInf;
  for (const auto& at : atoms_) hi = std::max(hi, at.x);
  for (const auto& p : pieces_) hi = std::max(hi, p.grid.back());
  return hi;
}

double RealMeasure::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
  double lo = support_lo(), hi = support_hi();
  if (q <= 0.0) return lo;
  if (cdf(lo) >= q) return lo;
  for (int i = 0; i < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= q) hi = mid;
    else lo = mid;
  }
  for (const auto& at : atoms_)
    if (std::abs(at.x - hi) <= 1e-12 * std::max(1.0, std::abs(hi))) return at.x;
  return hi;
}

// ---------------- PositiveMeasure ----------------

PositiveMeasure PositiveMeasure::from_law(std::shared_ptr<const ModulusLaw> law) {
  PositiveMeasure m;
  m.law_ = std::move(law);
  m.family_ = Family::derived;
  return m;
}

PositiveMeasure PositiveMeasure::from_parts(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                                            Tail tail) {
  if (tail == Tail::cauchy_modulus) {
    if (!atoms.empty() || !pieces.empty())
      throw MalformedMeasureError("a cauchy-modulus tail cannot be mixed with atoms or pieces");
    return cauchy_modulus(1.0);
  }
  for (const auto& a : atoms)
    if (a.x < 0) throw MalformedMeasureError("atom of a positive measure below 0");
  for (const auto& p : pieces)
    if (!p.grid.empty() && p.grid.front() < 0) throw MalformedMeasureError("density piece below 0");
  auto nu = RealMeasure::from_parts(std::move(atoms), std::move(pieces));
  PositiveMeasure m;
  m.atoms_ = nu.atoms();
  m.pieces_ = nu.pieces();
  m.family_ = Family::empirical;
  m.law_ = std::make_shared<detail::ShiftedRealLaw>(std::move(nu), 0.0, 0.0);
  return m;
}

PositiveMeasure PositiveMeasure::atomic(std::vector<Atom> atoms) { return from_parts(std::move(atoms), {}); }

PositiveMeasure PositiveMeasure::dirac(double x) { return atomic({{x, 1.0}}); }

PositiveMeasure PositiveMeasure::quarter_circle(double variance) {
  if (!(variance > 0) || !std::isfinite(variance)) throw DomainError("variance must be positive");
  PositiveMeasure m;
  m.law_ = std::make_shared<detail::QuarterCircleLaw>(variance);
  m.family_ = Family::quarter_circle;
  m.param_ = variance;
  return m;
}

PositiveMeasure PositiveMeasure::cauchy_modulus(double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) throw DomainError("Cauchy scale must be positive");
  PositiveMeasure m;
  m.law_ = std::make_shared<detail::CauchyModulusLaw>(scale);
  m.family_ = Family::cauchy_modulus;
  m.param_ = scale;
  m.tail_ = Tail::cauchy_modulus;
  return m;
}

PositiveMeasure PositiveMeasure::cauchy_power_modulus(int n) {
  PositiveMeasure m;
  m.law_ = std::make_shared<detail::CauchyPowerLaw>(n);
  m.family_ = Family::cauchy_power;
  m.param_ = n;
  m.tail_ = Tail::cauchy_modulus;
  return m;
}

PositiveMeasure PositiveMeasure::shifted_modulus(const RealMeasure& nu, double re, double im) {
  if (nu.is_atomic()) {
    std::vector<Atom> atoms;
    atoms.reserve(nu.atoms().size());
    for (const auto& a : nu.atoms()) atoms.push_back({std::hypot(a.x - re, im), a.mass});
    double total = 0.0;
    for (const auto& a : atoms) total += a.mass;
    for (auto& a : atoms) a.mass /= total;  // rounding only; nu was validated
    return atomic(std::move(atoms));
  }
  return from_law(std::make_shared<detail::ShiftedRealLaw>(nu, re, im));
}

double PositiveMeasure::total_mass() const {
  if (family_ != Family::empirical) return 1.0;
  double total = 0.0;
  for (const auto& a : atoms_) total += a.mass;
  for (const auto& p : pieces_)
    for (std::size_t i = 1; i < p.grid.size(); ++i)
      total += detail::segment_mass(p.grid[i - 1], p.grid[i], p.values[i - 1], p.values[i]);
  return total;
}

// ---------------- symmetric measures and transforms ----------------

SymmetricMeasure symmetrize(const PositiveMeasure& nu) {
  if (std::abs(nu.total_mass() - 1.0) > kMassTol) throw MalformedMeasureError("total mass differs from 1");
  return SymmetricMeasure(nu);
}

PositiveMeasure modulus_pushforward(const SymmetricMeasure& mu) { return mu.modulus(); }

SymmetricMeasure bernoulli(double gamma) { return symmetrize(PositiveMeasure::dirac(std::abs(gamma))); }
SymmetricMeasure semicircle(double variance) { return symmetrize(PositiveMeasure::quarter_circle(variance)); }
SymmetricMeasure symmetric_cauchy(double scale) { return symmetrize(PositiveMeasure::cauchy_modulus(scale)); }

TransformValues transforms(const ModulusLaw& law, double s) {
  if (!(s > 0) || !std::isfinite(s)) throw DomainError("transform argument must be positive and finite");
  const Kernels k = law.kernels(s);
  if (!(k.d > 0) || !std::isfinite(k.d) || !std::isfinite(k.n))
    throw NumericalDegeneracyError("h-transform degenerate at s = " + std::to_string(s));
  TransformValues t;
  t.s = s;
  t.k = k;
  t.h = s * k.d;
  t.f = k.n / (s * k.d);
  t.p = k.n / k.d;
  t.dp = 2 * s * (k.n * k.e - k.m * k.d) / (k.d * k.d);
  return t;
}

TransformValues transforms(const SymmetricMeasure& mu, double s) { return transforms(mu.law(), s); }

double h_transform(const SymmetricMeasure& mu, double s) { return transforms(mu, s).h; }
double f_transform(const SymmetricMeasure& mu, double s) { return transforms(mu, s).f; }
double p_ratio(const SymmetricMeasure& mu, double s) { return transforms(mu, s).p; }
double p_ratio_deriv(const SymmetricMeasure& mu, double s) { return transforms(mu, s).dp; }

LambdaBounds lambda_bounds(const ModulusLaw& law) {
  const double inv = law.inverse_second_moment();
  const double sec = law.second_moment();
  LambdaBounds b;
  b.lambda1 = (std::isinf(inv) || law.mass_at_zero() > 0) ? 0.0 : 1.0 / std::sqrt(inv);
  b.lambda2 = std::sqrt(sec);
  return b;
}

LambdaBounds lambda_bounds(const SymmetricMeasure& mu) { return lambda_bounds(mu.law()); }

double density_at_zero_of_convolution(double s1_0, double s2_0) {
  if (!std::isfinite(s1_0) || !std::isfinite(s2_0) || s1_0 < 0 || s2_0 < 0 || s1_0 + s2_0 <= 0)
    throw ClassificationError("density at zero needs finite boundary values");
  return 1.0 / (std::numbers::pi * (s1_0 + s2_0));
}

}  // namespace brownkit
