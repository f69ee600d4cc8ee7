#include "blowup/test_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace blowup;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x(i++) = c;
  return x;
}

// Composite Simpson on a fixed mesh.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("s_value examples") {
  CutoffFamily fam;
  fam.R = 2.0;
  CHECK(s_value(fam, pt({0.0}), 0.0) == doctest::Approx(0.5));
  fam.R = 4.0;
  CHECK(s_value(fam, pt({std::sqrt(3.0)}), 0.0) == doctest::Approx(1.0));
  fam.alpha = 1.0;
  CHECK(s_value(fam, pt({0.0}), 3.0) == doctest::Approx(1.0));
}

TEST_CASE("in_region examples") {
  CutoffFamily fam;
  CHECK(in_region(fam, pt({0.0}), 0.0, 1.0));
  CHECK_FALSE(in_region(fam, pt({0.0}), 1.0, 1.0));
  CHECK(in_region(fam, pt({1.0}), 0.0, 2.0));
}

TEST_CASE("transition profile shape") {
  for (ProfileKind kind : {ProfileKind::Smooth, ProfileKind::CubicHermite}) {
    const TransitionProfile eta{kind};
    CHECK(eta.value(0.0) == 1.0);
    CHECK(eta.value(0.5) == 1.0);
    CHECK(eta.value(1.0) == 0.0);
    CHECK(eta.value(3.0) == 0.0);
    CHECK(eta.value_star(0.49) == 0.0);
    CHECK(eta.value_star(0.7) == eta.value(0.7));
    // Strict decrease is resolvable in double precision only away from the ends.
    double prev = eta.value(0.55);
    for (int i = 1; i <= 80; ++i) {
      const double s = 0.55 + 0.4 * i / 80.0;
      CHECK(eta.value(s) < prev);
      CHECK(eta.d1(s) <= 0.0);
      prev = eta.value(s);
    }
  }
}

TEST_CASE("psi support and the value at s = 3/4") {
  CutoffFamily fam;
  fam.R = 8.0;
  // s = 3/4 at t = 5 with x = 0: ⟨0⟩² + 5 = 6 = 0.75 R.
  const double v = psi(fam, pt({0.0}), 5.0);
  // η(3/4) = 1/2 by the symmetry g(2−2s) ↔ g(2s−1); 2p' = 4.
  CHECK(v == doctest::Approx(0.0625).epsilon(1e-14));
  // Quadrature cross-check: η(3/4) = −∫_{3/4}^1 η'.
  const double eta = -simpson([&](double s) { return fam.profile.d1(s); }, 0.75, 1.0, 2000);
  CHECK(std::pow(eta, 4) == doctest::Approx(v).epsilon(1e-9));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    fam.R = 1.0 + 50.0 * U(rng);
    fam.alpha = U(rng);
    const Point x = pt({10.0 * (U(rng) - 0.5), 10.0 * (U(rng) - 0.5)});
    const double t = 20.0 * U(rng);
    const double s = s_value(fam, x, t);
    if (s <= 0.5) {
      CHECK(psi(fam, x, t) == 1.0);
      CHECK(psi_star(fam, x, t) == 0.0);
    } else if (s >= 1.0) {
      CHECK(psi(fam, x, t) == 0.0);
      CHECK(psi_star(fam, x, t) == 0.0);
    } else {
      CHECK(psi_star(fam, x, t) == psi(fam, x, t));
    }
    CHECK(psi(fam.with_radius(fam.R * 1.5), x, t) >= psi(fam, x, t));
  }
}

TEST_CASE("derivatives match finite differences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int tested = 0;
  for (int i = 0; i < 1000; ++i) {
    CutoffFamily fam;
    fam.R = 5.0 + 20.0 * U(rng);
    fam.alpha = U(rng);
    fam.p = 1.5 + 2.0 * U(rng);
    const int N = 1 + static_cast<int>(3.0 * U(rng));
    Point x = Point::Zero(N);
    for (int k = 0; k < N; ++k) x(k) = 2.0 * (U(rng) - 0.5);
    // Place (x, t) inside the transition shell.
    const double t = std::max(0.0, fam.R * (0.55 + 0.4 * U(rng)) - region_coordinate(fam.alpha, x, 0.0));
    const double s = s_value(fam, x, t);
    if (s <= 0.5 || s >= 1.0) continue;
    ++tested;

    const double dt = 1e-5;
    const TimeDerivatives d = psi_time_derivs(fam, x, t);
    const double f0 = psi(fam, x, t), fp = psi(fam, x, t + dt), fm = psi(fam, x, t - dt);
    const double scale1 = 1.0 / fam.R, scale2 = scale1 * scale1;
    CHECK(std::abs((fp - fm) / (2 * dt) - d.first) <= 1e-6 * std::max(std::abs(d.first), scale1));
    // Second differences use a wider step to keep rounding below the tolerance.
    const double dt2 = 1e-3;
    const double gp = psi(fam, x, t + dt2), gm = psi(fam, x, t - dt2);
    CHECK(std::abs((gp - 2 * f0 + gm) / (dt2 * dt2) - d.second) <= 1e-4 * std::max(std::abs(d.second), scale2));

    const double hx = 1e-3;
    double lap = 0.0;
    for (int k = 0; k < N; ++k) {
      Point a = x, b = x;
      a(k) += hx;
      b(k) -= hx;
      lap += (psi(fam, a, t) - 2 * f0 + psi(fam, b, t)) / (hx * hx);
    }
    CHECK(std::abs(lap - psi_laplacian(fam, x, t)) <= 1e-4 * std::max(std::abs(lap), scale1));
  }
  CHECK(tested > 500);
}

TEST_CASE("time derivative chain rule") {
  CutoffFamily fam;
  fam.R = 10.0;
  const Point x = pt({1.0});
  const double t = 5.0;
  const double s = s_value(fam, x, t);
  const double P = fam.power();
  const double expected = P * std::pow(fam.profile.value(s), P - 1) * fam.profile.d1(s) / fam.R;
  CHECK(psi_time_derivs(fam, x, t).first == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("derivatives vanish on P(R/2)") {
  CutoffFamily fam;
  fam.R = 10.0;
  const Point x = pt({0.5, 0.5});
  CHECK(psi_time_derivs(fam, x, 1.0).first == 0.0);
  CHECK(psi_time_derivs(fam, x, 1.0).second == 0.0);
  CHECK(psi_laplacian(fam, x, 1.0) == 0.0);
}

TEST_CASE("bound constants") {
  SUBCASE("zero when sampled inside P(R/2)") {
    CutoffFamily fam;
    fam.R = 10.0;
    BoundSampling s;
    s.s_max = 0.5;
    const BoundConstants c = sample_bound_constants(fam, s);
    CHECK(c.C1 == 0.0);
    CHECK(c.C2 == 0.0);
    CHECK(c.C3 == 0.0);
  }

  SUBCASE("C1 independent of R") {
    CutoffFamily fam;
    fam.p = 2.0;
    fam.R = 10.0;
    const double c10 = bound_constants(fam).C1;
    fam.R = 1000.0;
    const double c1000 = bound_constants(fam).C1;
    CHECK(c10 > 0.0);
    CHECK(std::abs(c10 / c1000 - 1.0) < 0.10);
  }

  SUBCASE("power-1 cubic profile diverges") {
    CutoffFamily fam{TransitionProfile{ProfileKind::CubicHermite}, 100.0, 0.0, 2.0, 1.0};
    CHECK_THROWS_AS(bound_constants(fam), DivergentBoundError);
  }
}

TEST_CASE("log-2 tail inequality") {
  const TransitionProfile eta;
  for (double P : {3.0, 4.0, 6.0}) {
    for (int i = 0; i <= 40; ++i) {
      const double sigma = 1.2 * i / 40.0;
      const double lhs = log2_tail_integral(eta, P, sigma);
      CHECK(lhs <= std::log(2.0) * std::pow(eta.value(sigma), P) + 1e-10);
      if (sigma >= 1.0) CHECK(lhs == 0.0);
    }
  }
  // Independent quadrature at σ = 0: ∫_{1/2}^1 η^P / s.
  const double ref = simpson([&](double s) { return std::pow(eta.value(s), 4.0) / s; }, 0.5, 1.0, 4000);
  CHECK(log2_tail_integral(eta, 4.0, 0.0) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("cutoff suite support and tail checks") {
  for (const CheckResult& r : run_cutoff_suite()) {
    if (r.name == "bound constants stable in R") continue;  // covered by the acceptance binary
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("validate") {
  CutoffFamily fam;
  fam.alpha = 1.5;
  CHECK_THROWS_AS(fam.validate(), std::invalid_argument);
  fam.alpha = 0.5;
  fam.p = 1.0;
  CHECK_THROWS_AS(fam.validate(), std::invalid_argument);
}
