#include <cmath>
#include <random>

#include "brownkit/errors.hpp"
#include "brownkit/operator_models.hpp"
#include "brownkit/subordination.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace brownkit;

namespace {

Eigen::MatrixXcd diag(std::initializer_list<double> xs) {
  Eigen::VectorXcd v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v.asDiagonal();
}

void check_close(const ResolventFunctionals& a, const ResolventFunctionals& b, double tol) {
  auto near = [&](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); };
  CHECK(near(a.phi_hinv, b.phi_hinv));
  CHECK(near(a.phi_hinv2, b.phi_hinv2));
  CHECK(near(a.phi_hk, b.phi_hk));
  CHECK(std::abs(a.phi_x_hinv - b.phi_x_hinv) <= tol * std::max(1.0, std::abs(b.phi_x_hinv)));
  CHECK(std::abs(a.phi_x_hinv2 - b.phi_x_hinv2) <= tol * std::max(1.0, std::abs(b.phi_x_hinv2)));
}

}  // namespace

TEST_SUITE("operator_models") {

TEST_CASE("modulus distribution examples") {
  auto m = modulus_distribution(OperatorModel::zero(), cplx(3, 4));
  REQUIRE(m.atoms().size() == 1);
  CHECK(m.atoms()[0].x == doctest::Approx(5.0).epsilon(1e-15));

  auto x0 = OperatorModel::normal({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
  m = modulus_distribution(x0, 0.0);
  REQUIRE(m.atoms().size() == 2);
  CHECK(m.atoms()[0].x == 0.0);
  CHECK(m.atoms()[0].mass == doctest::Approx(0.5));
  CHECK(m.atoms()[1].x == 1.0);
  CHECK(m.atoms()[1].mass == doctest::Approx(0.5));

  m = modulus_distribution(OperatorModel::matrix(diag({1, -1})), 0.0);
  REQUIRE(m.atoms().size() == 1);
  CHECK(m.atoms()[0].x == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.atoms()[0].mass == doctest::Approx(1.0));
}

TEST_CASE("resolvent functionals of scalars and small models") {
  const cplx lam(0.3, -0.8);
  const double s = 0.6;
  const double q = std::norm(lam) + s * s;
  auto r = resolvent_functionals(OperatorModel::zero(), lam, s);
  CHECK(r.phi_hinv == doctest::Approx(1 / q).epsilon(1e-15));
  // phi((lambda - x0) h^-2) with x0 = 0; its modulus is |lambda|/q^2
  CHECK(std::abs(r.phi_x_hinv2 - lam / (q * q)) < 1e-15);
  CHECK(std::abs(r.phi_x_hinv - std::conj(lam) / q) < 1e-15);

  auto pm = OperatorModel::selfadjoint(RealMeasure::from_parts({{1.0, 0.5}, {-1.0, 0.5}}, {}));
  CHECK(resolvent_functionals(pm, 0.0, 1.0).phi_hinv == doctest::Approx(0.5).epsilon(1e-15));

  auto mat = OperatorModel::matrix(diag({1, -1}));
  for (cplx l : {cplx(0, 0), cplx(0.4, 0.2), cplx(-2, 1)})
    for (double ss : {0.1, 1.0, 3.0}) check_close(resolvent_functionals(mat, l, ss), resolvent_functionals(pm, l, ss), 1e-14);
}

TEST_CASE("selfadjoint, normal and matrix realizations agree") {
  auto sa = OperatorModel::selfadjoint(RealMeasure::from_parts({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}}, {}));
  auto nm = OperatorModel::normal({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
  auto mt = OperatorModel::matrix(diag({-1, 0, 0, 1}));
  // a unitary conjugate is the same operator under the trace
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) z(i, j) = cplx(g(gen), g(gen));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd u = qr.householderQ();
  auto rot = OperatorModel::matrix(u * diag({-1, 0, 0, 1}) * u.adjoint());
  for (double x = -1.5; x <= 1.5; x += 0.5)
    for (double y = -1.0; y <= 1.0; y += 0.5)
      for (double s : {0.05, 0.5, 2.0}) {
        const cplx l(x, y);
        const auto ref = resolvent_functionals(sa, l, s);
        check_close(resolvent_functionals(nm, l, s), ref, 1e-12);
        check_close(resolvent_functionals(mt, l, s), ref, 1e-12);
        check_close(resolvent_functionals(rot, l, s), ref, 1e-10);  // dense inverse, cond ~ 1/s^2
        CHECK(ref.phi_hk == ref.phi_hinv2);
      }
}

TEST_CASE("non-normal matrix functionals") {
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 0, 0;  // nilpotent Jordan block
  auto m = OperatorModel::matrix(x);
  auto r = resolvent_functionals(m, 0.0, 0.5);
  // h = diag(s^2, 1+s^2), k = diag(1+s^2, s^2)
  const double s2 = 0.25;
  CHECK(r.phi_hinv == doctest::Approx(0.5 * (1 / s2 + 1 / (1 + s2))));
  CHECK(r.phi_hk == doctest::Approx(1 / (s2 * (1 + s2))));
  CHECK(r.phi_hinv2 >= r.phi_hinv * r.phi_hinv);
  CHECK_THROWS_AS(resolvent_functionals(m, 0.0, 0.0), SingularityError);
  auto atoms = m.eigenvalue_atoms();
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].mass == doctest::Approx(0.5));  // kernel dimension 1 of 2
}

TEST_CASE("selfadjoint density model against direct integration") {
  auto nu = RealMeasure::from_parts({}, {{{-1.0, 1.0}, {0.5, 0.5}}});
  auto m = OperatorModel::selfadjoint(nu);
  for (cplx l : {cplx(0.2, 0.3), cplx(1.5, 0.0), cplx(-0.9, 0.05)})
    for (double s : {0.01, 0.4}) {
      const double a = l.real(), b = l.imag();
      auto integ = [&](auto f) { return fixtures::simpson([&](double u) { return 0.5 * f(u); }, -1, 1, 400000); };
      auto q = [&](double u) { return (u - a) * (u - a) + b * b + s * s; };
      const double d = integ([&](double u) { return 1 / q(u); });
      const double e = integ([&](double u) { return 1 / (q(u) * q(u)); });
      const double xr = integ([&](double u) { return (a - u) / (q(u) * q(u)); });
      const auto r = resolvent_functionals(m, l, s);
      INFO(l << " s=" << s);
      CHECK(r.phi_hinv == doctest::Approx(d).epsilon(1e-7));
      CHECK(r.phi_hinv2 == doctest::Approx(e).epsilon(1e-6));
      CHECK(r.phi_x_hinv2.real() == doctest::Approx(xr).epsilon(1e-6));
      CHECK(r.phi_x_hinv2.imag() == doctest::Approx(b * e).epsilon(1e-6));
    }
}

TEST_CASE("symmetrized moduli of the named families") {
  auto h = rdiag_symmetrized_modulus(RDiagonalSpec::haar(1.0));
  CHECK(h_transform(h, 1.0) == doctest::Approx(0.5));
  auto c = rdiag_symmetrized_modulus(RDiagonalSpec::circular(1.0));
  CHECK(h_transform(c, 1.0) == doctest::Approx((std::sqrt(5.0) - 1) / 2));
  auto p = rdiag_symmetrized_modulus(RDiagonalSpec::circular_cauchy_power(1));
  for (double s : {0.2, 1.0, 4.0}) CHECK(h_transform(p, s) == doctest::Approx(1 / (s + 1)).epsilon(1e-15));
}

TEST_CASE("radial cdf examples") {
  auto haar = RDiagonalSpec::haar(1.0);
  CHECK(radial_cdf(haar, 0.9) == 0.0);
  CHECK(radial_cdf(haar, 1.1) == 1.0);
  CHECK(radial_cdf(haar, 1.0) == 1.0);
  for (double r : {0.1, 0.5, 0.99}) CHECK(radial_cdf(RDiagonalSpec::circular(1.0), r) == doctest::Approx(r * r));
  for (double r : {0.1, 1.0, 7.0})
    CHECK(std::abs(radial_cdf(RDiagonalSpec::circular_cauchy(1.0), r) - r * r / (1 + r * r)) < 1e-10);
  CHECK_THROWS_AS(radial_cdf(haar, 0.0), DomainError);
}

TEST_CASE("general radial cdf path reproduces the closed forms") {
  auto gc = RDiagonalSpec::general(PositiveMeasure::quarter_circle(2.0));
  auto gk = RDiagonalSpec::general(PositiveMeasure::cauchy_modulus(1.5));
  auto gp = RDiagonalSpec::general(PositiveMeasure::cauchy_power_modulus(3));
  auto gh = RDiagonalSpec::general(PositiveMeasure::dirac(0.7));
  for (double r : {0.05, 0.3, 0.9, 1.3, 3.0, 20.0}) {
    INFO("r=" << r);
    CHECK(std::abs(radial_cdf(gc, r) - radial_cdf(RDiagonalSpec::circular(2.0), r)) < 1e-10);
    CHECK(std::abs(radial_cdf(gk, r) - radial_cdf(RDiagonalSpec::circular_cauchy(1.5), r)) < 1e-10);
    CHECK(std::abs(radial_cdf(gp, r) - radial_cdf(RDiagonalSpec::circular_cauchy_power(3), r)) < 1e-10);
    CHECK(radial_cdf(gh, r) == radial_cdf(RDiagonalSpec::haar(0.7), r));
  }
}

TEST_CASE("radial cdf is monotone and carries the atom at zero") {
  auto T = RDiagonalSpec::general(PositiveMeasure::from_parts({{0.0, 0.3}}, {{{0.5, 2.0}, {0.7 / 1.5, 0.7 / 1.5}}}));
  double prev = 0;
  for (double r = 0.01; r < 3; r += 0.01) {
    const double F = radial_cdf(T, r);
    CHECK(F >= prev - 1e-14);
    prev = F;
  }
  CHECK(radial_cdf(T, 1e-6) == doctest::Approx(0.3).epsilon(1e-6));
  const double l2 = lambda_bounds(T.modulus().law()).lambda2;
  CHECK(radial_cdf(T, l2) == 1.0);
}

TEST_CASE("S-transforms") {
  for (double z : {-0.9, -0.5, -0.1}) {
    CHECK(s_transform(PositiveMeasure::quarter_circle(2.0), z) == doctest::Approx(1 / (2.0 * (1 + z))).epsilon(1e-10));
    CHECK(s_transform(PositiveMeasure::cauchy_modulus(1.0), z) == doctest::Approx(-z / (1 + z)).epsilon(1e-10));
    CHECK(s_transform(PositiveMeasure::dirac(2.0), z) == doctest::Approx(0.25).epsilon(1e-10));
  }
  CHECK(psi_transform(PositiveMeasure::dirac(1.0), -1.0) == doctest::Approx(-0.5));
}

TEST_CASE("lambda2 squared is additive") {
  auto a = symmetrize(PositiveMeasure::from_parts({{0.5, 0.2}}, {{{0.0, 2.0}, {0.4, 0.4}}}));
  auto b = symmetrize(PositiveMeasure::from_parts({}, {{{1.0, 2.0, 3.0}, {0.0, 1.0, 0.0}}}));
  const double la = lambda_bounds(a).lambda2, lb = lambda_bounds(b).lambda2;
  const double t = 1e5;
  const auto p = solve_subordination(a, b, t);
  // f of the convolution is f1(s1) + f2(s2) = s1 + s2 - 2t, and t f(t) -> lambda2^2
  const double tf = t * (f_transform(a, p.s1) + f_transform(b, p.s2));
  CHECK(tf == doctest::Approx(la * la + lb * lb).epsilon(1e-4));
}

}  // TEST_SUITE
