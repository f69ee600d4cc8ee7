#pragma once

#include "blowup/check.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace blowup {

using Point = Eigen::VectorXd;

enum class CrossSectionKind {
  FullSphere,
  HalfLine,
  FullLine,
  PlanarSector,
  SphericalCap,
  HalfSpaceProduct,
};

std::string_view to_string(CrossSectionKind kind);
CrossSectionKind cross_section_kind_from_string(std::string_view name);

/// Cross-section Σ ⊂ S^{N-1} of a cone C_Σ = {rω : r > 0, ω ∈ Σ}.
///
/// Only the fields relevant to `kind` are read: `omega` for planar sectors,
/// `theta0` for spherical caps (measured from the +x_3 axis), `k` for
/// R_+^k × R^{N-k}.
struct CrossSectionSpec {
  CrossSectionKind kind = CrossSectionKind::FullSphere;
  int N = 1;
  double omega = 0.0;
  double theta0 = 0.0;
  int k = 0;

  /// Throws std::invalid_argument on an unsupported kind/dimension pairing.
  void validate() const;
};

/// A cone together with its first Dirichlet eigenpair on Σ and exponent γ.
class ConeDomain {
 public:
  ConeDomain() = default;
  ConeDomain(CrossSectionSpec spec, double lambda_sigma, double gamma);

  const CrossSectionSpec& spec() const { return spec_; }
  int dimension() const { return spec_.N; }
  double lambda_sigma() const { return lambda_sigma_; }
  double gamma() const { return gamma_; }

  /// φ_Σ at a unit direction, sup-normalized to 1; half-space products use
  /// the explicit product ω_1⋯ω_k instead.
  double angular_profile(const Point& direction) const;

  /// Open-cone membership.
  bool contains(const Point& x) const;
  /// Closed-cone membership, with a relative slack of `tol`.
  bool contains_closure(const Point& x, double tol = 1e-12) const;
  /// Euclidean distance from x (inside the cone) to ∂C_Σ; +inf without boundary.
  double boundary_distance(const Point& x) const;

 private:
  CrossSectionSpec spec_;
  double lambda_sigma_ = 0.0;
  double gamma_ = 0.0;
};

/// Positive root of γ² + (N−2)γ − λ = 0.
double gamma_root(int N, double lambda_sigma);

/// (π/ω)², first Dirichlet eigenvalue of −d²/dθ² on (0, ω).
double sector_eigenvalue(double omega);

/// First Dirichlet eigenvalue of the Laplace–Beltrami operator on the
/// spherical cap {θ < θ0} ⊂ S², found by shooting on the Legendre equation.
double cap_eigenvalue(double theta0);

/// Legendre function P_ν(cos θ) for 0 ≤ θ < π, via its hypergeometric series.
double legendre_p(double nu, double theta);

ConeDomain make_domain(const CrossSectionSpec& spec);

/// Harmonic weight Φ(x) = |x|^γ φ_Σ(x/|x|).
struct WeightPhi {
  ConeDomain domain;
  double operator()(const Point& x) const;
};

double phi_eval(const WeightPhi& w, const Point& x);

struct HarmonicResidual {
  double laplacian = 0.0;
  double euler = 0.0;
};

/// Centered-difference residuals |Δ_hΦ(x)| and |x·∇_hΦ(x) − γΦ(x)|.
HarmonicResidual harmonic_residual(const WeightPhi& w, const Point& x, double h);

/// A test field u together with its gradient, supported in the radial shell
/// [r_min, r_max].
struct TestField {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  double r_min = 0.0;
  double r_max = 0.0;
};

struct HardyQuadrature {
  int radial = 96;
  int polar = 48;
  int azimuthal = 96;
};

/// ((N−2)/2 + γ)².
double hardy_constant(const ConeDomain& d);

/// ∫|∇u|² / ∫|u|²|x|^{-2}, by midpoint quadrature in (log r, angles).
double hardy_ratio(const ConeDomain& d, const TestField& u,
                   const HardyQuadrature& q = {});

/// Random sum of one to three smooth bumps compactly supported inside the
/// cone and away from the origin.
TestField random_bump_field(const ConeDomain& d, std::uint64_t seed);

/// r^{−(N−2)/2} φ_Σ(ω) χ(log r) with χ a bump of half-width `log_half_width`.
TestField near_hardy_optimizer(const ConeDomain& d, double log_half_width);

struct HardySuiteReport {
  int fields = 0;
  int violations = 0;
  double constant = 0.0;
  double min_ratio = 0.0;
};

HardySuiteReport run_hardy_suite(const ConeDomain& d, int fields,
                                 std::uint64_t seed, double tol = 1e-6);

/// Harmonicity and Euler-identity residuals of Φ at random interior points of
/// every supported cross-section kind.
std::vector<CheckResult> run_harmonic_suite(std::uint64_t seed, int points = 50);

/// 1 + 2/(N + γ − α).
double fujita_threshold(int N, double gamma, double alpha);

}  // namespace blowup
