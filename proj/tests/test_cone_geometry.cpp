#include "blowup/cone_geometry.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

using namespace blowup;

namespace {

const double kPi = std::acos(-1.0);

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

// Finite-volume discretization of (sin θ u')' + λ sin θ u = 0 on (0, θ0),
// u'(0) = 0, u(θ0) = 0; smallest generalized eigenvalue.
double cap_eigenvalue_fv(double theta0, int n) {
  const double h = theta0 / n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    const double lo = i == 0 ? 0.0 : (i - 0.5) * h;
    w(i) = std::cos(lo) - std::cos((i + 0.5) * h);
    const double right = std::sin((i + 0.5) * h) / h;
    A(i, i) += right;
    if (i + 1 < n) {
      A(i, i + 1) -= right;
      A(i + 1, i) -= right;
      A(i + 1, i + 1) += right;
    }
  }
  const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd S = s.asDiagonal() * A * s.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

CrossSectionSpec spec(CrossSectionKind kind, int N, double omega = 0.0, double theta0 = 0.0, int k = 0) {
  return {kind, N, omega, theta0, k};
}

}  // namespace

TEST_CASE("make_domain closed forms") {
  const ConeDomain sphere = make_domain(spec(CrossSectionKind::FullSphere, 3));
  CHECK(sphere.lambda_sigma() == 0.0);
  CHECK(sphere.gamma() == 0.0);

  const ConeDomain quarter = make_domain(spec(CrossSectionKind::HalfSpaceProduct, 2, 0, 0, 2));
  CHECK(quarter.lambda_sigma() == doctest::Approx(4.0));
  CHECK(quarter.gamma() == doctest::Approx(2.0));

  const ConeDomain sector = make_domain(spec(CrossSectionKind::PlanarSector, 2, kPi / 2));
  CHECK(sector.lambda_sigma() == doctest::Approx(quarter.lambda_sigma()).epsilon(1e-14));
  CHECK(sector.gamma() == doctest::Approx(quarter.gamma()).epsilon(1e-14));

  CHECK(make_domain(spec(CrossSectionKind::HalfLine, 1)).gamma() == 1.0);
  CHECK(make_domain(spec(CrossSectionKind::FullLine, 1)).gamma() == 0.0);
}

TEST_CASE("make_domain rejects invalid specs") {
  CHECK_THROWS_AS(make_domain(spec(CrossSectionKind::HalfLine, 2)), std::invalid_argument);
  CHECK_THROWS_AS(make_domain(spec(CrossSectionKind::PlanarSector, 3, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_domain(spec(CrossSectionKind::PlanarSector, 2, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_domain(spec(CrossSectionKind::SphericalCap, 3, 0, -0.1)), std::invalid_argument);
  CHECK_THROWS_AS(make_domain(spec(CrossSectionKind::SphericalCap, 2, 0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(make_domain(spec(CrossSectionKind::HalfSpaceProduct, 2, 0, 0, 3)), std::invalid_argument);
}

TEST_CASE("gamma_root") {
  CHECK(gamma_root(3, 2.0) == doctest::Approx(1.0));
  CHECK(gamma_root(5, 0.0) == 0.0);
  for (int N = 2; N <= 6; ++N)
    for (double lam : {0.0, 0.3, 2.0, 17.0}) {
      const double g = gamma_root(N, lam);
      CHECK(g >= 0.0);
      CHECK(std::abs(g * g + (N - 2) * g - lam) <= 1e-12 * std::max(1.0, lam));
    }
}

TEST_CASE("sector_eigenvalue") {
  CHECK(sector_eigenvalue(kPi) == doctest::Approx(1.0));
  CHECK(sector_eigenvalue(kPi / 2) == doctest::Approx(4.0));
  for (double w : {0.1, 1.0, 2.5, 6.0}) CHECK(sector_eigenvalue(w) * w * w == doctest::Approx(kPi * kPi));
  CHECK_THROWS_AS(sector_eigenvalue(0.0), std::invalid_argument);
  CHECK_THROWS_AS(sector_eigenvalue(7.0), std::invalid_argument);
}

TEST_CASE("cap_eigenvalue") {
  CHECK(std::abs(cap_eigenvalue(kPi / 2) - 2.0) <= 2e-8);

  SUBCASE("small cap against the Bessel limit and a finite-volume oracle") {
    const double j0 = 2.404825557695773;
    const double lam = cap_eigenvalue(0.1);
    CHECK(std::abs(lam / std::pow(j0 / 0.1, 2) - 1.0) < 0.05);
    const double fv = cap_eigenvalue_fv(0.1, 400);
    CHECK(std::abs(lam / fv - 1.0) < 1e-4);
  }

  SUBCASE("moderate cap against the finite-volume oracle") {
    const double fv = cap_eigenvalue_fv(1.2, 400);
    CHECK(std::abs(cap_eigenvalue(1.2) / fv - 1.0) < 1e-4);
  }

  SUBCASE("decreases to zero as the cap fills the sphere") {
    double prev = cap_eigenvalue(0.5);
    for (double t : {1.0, 1.5, 2.0, 2.5, 3.0, 3.1, 3.14}) {
      const double lam = cap_eigenvalue(t);
      CHECK(lam < prev);
      prev = lam;
    }
    // Logarithmic approach: λ ≈ 1/(2 log(2/(π − θ0))).
    CHECK(prev < 0.1);
  }
}

TEST_CASE("phi_eval") {
  const WeightPhi quarter{make_domain(spec(CrossSectionKind::HalfSpaceProduct, 2, 0, 0, 2))};
  CHECK(phi_eval(quarter, pt({1.0, 1.0})) == doctest::Approx(1.0));
  CHECK(phi_eval(quarter, pt({2.0, 3.0})) == doctest::Approx(6.0));

  const WeightPhi half{make_domain(spec(CrossSectionKind::HalfLine, 1))};
  CHECK(phi_eval(half, pt({3.0})) == doctest::Approx(3.0));

  const WeightPhi plane{make_domain(spec(CrossSectionKind::FullSphere, 2))};
  CHECK(phi_eval(plane, pt({-4.0, 0.5})) == doctest::Approx(1.0));

  const WeightPhi line{make_domain(spec(CrossSectionKind::FullLine, 1))};
  CHECK(phi_eval(line, pt({-7.0})) == doctest::Approx(1.0));

  CHECK_THROWS_AS(phi_eval(quarter, pt({-1.0, 1.0})), std::invalid_argument);

  SUBCASE("positive inside, zero on the boundary") {
    const WeightPhi cap{make_domain(spec(CrossSectionKind::SphericalCap, 3, 0, 1.0))};
    CHECK(phi_eval(cap, pt({0.1, 0.0, 1.0})) > 0.0);
    CHECK(std::abs(phi_eval(cap, pt({std::sin(1.0), 0.0, std::cos(1.0)}))) < 1e-8);
  }
}

TEST_CASE("harmonic_residual") {
  const WeightPhi quarter{make_domain(spec(CrossSectionKind::HalfSpaceProduct, 2, 0, 0, 2))};
  for (double h : {0.1, 1e-2}) CHECK(harmonic_residual(quarter, pt({1.0, 2.0}), h).laplacian < 1e-9);

  const WeightPhi half{make_domain(spec(CrossSectionKind::HalfLine, 1))};
  CHECK(harmonic_residual(half, pt({2.0}), 1e-2).euler < 1e-12);

  SUBCASE("second order in a 3pi/4 sector") {
    // On the bisector the h² terms cancel by symmetry, so use θ = ω/3.
    const double w = 3 * kPi / 4;
    const WeightPhi sector{make_domain(spec(CrossSectionKind::PlanarSector, 2, w))};
    const Point x = pt({std::cos(w / 3), std::sin(w / 3)});
    const HarmonicResidual a = harmonic_residual(sector, x, 1e-2);
    const HarmonicResidual b = harmonic_residual(sector, x, 5e-3);
    CHECK(a.laplacian / b.laplacian == doctest::Approx(4.0).epsilon(0.1));
    CHECK(a.euler / b.euler == doctest::Approx(4.0).epsilon(0.1));
  }

  CHECK_THROWS_AS(harmonic_residual(quarter, pt({0.001, 1.0}), 0.01), std::invalid_argument);
}

TEST_CASE("harmonic suite passes") {
  for (const CheckResult& r : run_harmonic_suite(3, 10)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("hardy_ratio") {
  SUBCASE("classical constant in three dimensions") {
    const ConeDomain d = make_domain(spec(CrossSectionKind::FullSphere, 3));
    CHECK(hardy_constant(d) == doctest::Approx(0.25));
    const HardySuiteReport r = run_hardy_suite(d, 40, 11);
    CHECK(r.violations == 0);
    CHECK(r.min_ratio >= 0.25 - 1e-6);
  }

  SUBCASE("quarter plane") {
    const ConeDomain d = make_domain(spec(CrossSectionKind::PlanarSector, 2, kPi / 2));
    CHECK(hardy_constant(d) == doctest::Approx(4.0));
    const HardySuiteReport r = run_hardy_suite(d, 40, 12);
    CHECK(r.violations == 0);
  }

  SUBCASE("near optimizer approaches the constant") {
    for (const auto& s : {spec(CrossSectionKind::FullSphere, 3), spec(CrossSectionKind::PlanarSector, 2, kPi / 2),
                          spec(CrossSectionKind::HalfLine, 1)}) {
      const ConeDomain d = make_domain(s);
      const double ratio = hardy_ratio(d, near_hardy_optimizer(d, 8.0));
      INFO(to_string(s.kind));
      CHECK(ratio >= hardy_constant(d) - 1e-6);
      CHECK(ratio <= 1.25 * hardy_constant(d) + 1e-6);
    }
  }

  SUBCASE("zero field rejected") {
    const ConeDomain d = make_domain(spec(CrossSectionKind::FullSphere, 3));
    TestField zero{[](const Point&) { return 0.0; }, [](const Point& x) { return Point::Zero(x.size()).eval(); },
                   1.0, 2.0};
    CHECK_THROWS_AS(hardy_ratio(d, zero), std::invalid_argument);
  }
}

TEST_CASE("fujita_threshold") {
  CHECK(fujita_threshold(1, 0, 0) == doctest::Approx(3.0));
  CHECK(fujita_threshold(3, 0, 1) == doctest::Approx(2.0));
  CHECK(fujita_threshold(2, 2, 0) == doctest::Approx(1.5));
  CHECK(fujita_threshold(2, 0, 0) > fujita_threshold(3, 0, 0));
  CHECK(fujita_threshold(2, 0.5, 0) > fujita_threshold(2, 1.0, 0));
  CHECK(fujita_threshold(2, 0, 0.5) > fujita_threshold(2, 0, 0.0));
  CHECK_THROWS_AS(fujita_threshold(1, 0, 1), std::invalid_argument);
}
