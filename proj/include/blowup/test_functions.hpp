#pragma once

#include "blowup/check.hpp"
#include "blowup/cone_geometry.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace blowup {

enum class ProfileKind {
  /// η(s) = g(2−2s)/(g(2−2s)+g(2s−1)), g(t) = e^{−1/t}: C^∞, flat at both ends.
  Smooth,
  /// Cubic smoothstep on (1/2, 1); only C^1 at the ends. Used as a control.
  CubicHermite,
};

/// Non-increasing transition η with η = 1 on [0, 1/2] and η = 0 on [1, ∞).
struct TransitionProfile {
  ProfileKind kind = ProfileKind::Smooth;

  double value(double s) const;
  double d1(double s) const;
  double d2(double s) const;
  /// η*(s): 0 on [0, 1/2), η(s) on [1/2, ∞).
  double value_star(double s) const;
};

/// ψ_R = [η(s_R)]^{2p'}, s_R(x,t) = (⟨x⟩^{2−α} + t)/R.
struct CutoffFamily {
  TransitionProfile profile;
  double R = 1.0;
  double alpha = 0.0;
  double p = 2.0;
  /// Replaces the exponent 2p' when positive.
  double power_override = 0.0;

  double conjugate() const { return p / (p - 1.0); }
  double power() const { return power_override > 0.0 ? power_override : 2.0 * conjugate(); }
  CutoffFamily with_radius(double radius) const {
    CutoffFamily f = *this;
    f.R = radius;
    return f;
  }
  void validate() const;
};

/// ⟨x⟩ = (1 + |x|²)^{1/2}.
inline double japanese_bracket(const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); }

/// ⟨x⟩^{2−α} + t, the quantity bounded by R in P(R).
double region_coordinate(double alpha, const Point& x, double t);

double s_value(const CutoffFamily& fam, const Point& x, double t);
double psi(const CutoffFamily& fam, const Point& x, double t);
double psi_star(const CutoffFamily& fam, const Point& x, double t);

struct TimeDerivatives {
  double first = 0.0;
  double second = 0.0;
};

TimeDerivatives psi_time_derivs(const CutoffFamily& fam, const Point& x, double t);
/// Spatial Laplacian of ψ_R in R^N with N = x.size().
double psi_laplacian(const CutoffFamily& fam, const Point& x, double t);

/// Membership of (x, t) in P(R).
bool in_region(const CutoffFamily& fam, const Point& x, double t, double R);

struct BoundSampling {
  int n_s = 400;
  int n_r = 48;
  /// Largest s_R sampled; at most 1.
  double s_max = 1.0;
  int dimension = 1;
};

struct BoundConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
};

class DivergentBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empirical suprema over P(R) of R|∂tψ|/ψ*^{1/p}, R²|∂t²ψ|/ψ*^{1/p} and
/// R⟨x⟩^α|Δψ|/ψ*^{1/p} at one sampling resolution.
BoundConstants sample_bound_constants(const CutoffFamily& fam, const BoundSampling& sampling);

/// As sample_bound_constants, then refines the sampling twice; throws
/// DivergentBoundError if any estimate keeps growing or is not finite.
BoundConstants bound_constants(const CutoffFamily& fam, const BoundSampling& sampling = {});

/// ∫_a^b f by adaptive Simpson with absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

/// ∫_σ^∞ [η*(s)]^{power} s^{−1} ds.
double log2_tail_integral(const TransitionProfile& profile, double power, double sigma,
                          double tol = 1e-10);

/// Support identities, log-2 inequality and R-stability of the bound constants.
std::vector<CheckResult> run_cutoff_suite();

}  // namespace blowup
