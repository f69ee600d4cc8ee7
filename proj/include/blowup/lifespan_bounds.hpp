#pragma once

#include "blowup/check.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace blowup {

/// Hypothesis data of the differential-inequality lemma:
/// δ + ∬wψ_R ≤ C₀ R^{−θ/p'} (∬wψ*_R)^{1/p} for R ∈ [R₁, T).
struct BoundInputs {
  double delta = 1.0;
  double C0 = 1.0;
  double R1 = 1.0;
  double theta = 0.0;
  double p = 2.0;

  void validate() const;
};

/// Upper bound for T implied by the criterion.
double key_lemma_bound(const BoundInputs& b);
/// log of key_lemma_bound, finite where the bound itself overflows.
double key_lemma_log_bound(const BoundInputs& b);

class OracleResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force route to the same bound: marches the saturated ODE
/// Z' = ((log 2)δ + Z)^p / ((log 2)C₀)^p together with d(log R)/dρ = R^{−(p−1)θ}
/// until Z blows up, and returns R at that moment. `step` is the step size
/// relative to the local growth time. Throws OracleResolutionError if halving
/// the step changes the answer by more than 1e−6 relative.
double ode_saturation_oracle(const BoundInputs& b, double step = 5e-3);

/// Radii R_i with y_i = ∬ w ψ*_{R_i} and m_i = ∬ w ψ_{R_i}; m is non-decreasing
/// in R, y is not in general.
struct FunctionalTrace {
  std::vector<double> radii;
  std::vector<double> y;
  std::vector<double> m;

  std::size_t size() const { return radii.size(); }
  void validate() const;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct YTransform {
  std::vector<double> Y;
  /// max_i |Y_i − Y_i(coarse)| / max(Y), from dropping every other radius.
  double refinement_error = 0.0;
};

/// Y(R_i) = ∫_0^{R_i} y(r) r^{−1} dr by the trapezoid rule in log r. The
/// integrand must vanish at the first radius. Throws TraceError when
/// Y ≤ (log 2)m fails beyond quadrature tolerance or the refinement error
/// exceeds 1%.
YTransform y_transform(const FunctionalTrace& tr);

struct CriterionResult {
  std::vector<double> radii;
  std::vector<bool> holds;
  /// Smallest C₀ for which every tested radius satisfies the criterion.
  double min_C0 = 0.0;
  /// Per-radius C₀ required, (δ + m) R^{θ/p'} / y^{1/p}.
  std::vector<double> required_C0;
};

/// Tests the criterion at every trace radius in [R₁, T). Throws
/// std::invalid_argument if the trace has no radius in that range.
CriterionResult criterion_check(const FunctionalTrace& tr, const BoundInputs& b,
                                double T = std::numeric_limits<double>::infinity());

enum class BoundForm {
  Exponential,   // exp(C ε^{−(p−1)})
  Power,         // C ε^{exponent}
  Borderline,    // C_δ ε^{−(p−1)−δ}
  LowPower,      // C ε^{−(p−1)}
};

std::string_view to_string(BoundForm f);

struct RegimeInputs {
  int N = 1;
  double gamma = 0.0;
  double alpha = 0.0;
  double p = 2.0;
  double epsilon = 1.0;
  double C = 1.0;
  /// Singular damping a(x) = V₀|x|^{−1}, N ≥ 3.
  bool singular = false;
  /// Loss exponent used by the borderline row.
  double delta_loss = 1e-3;
};

struct TheoremBound {
  BoundForm form = BoundForm::Power;
  /// ε-exponent of the power-type rows; for the exponential row, −(p−1).
  double exponent = 0.0;
  double value = 0.0;
};

/// Selects and evaluates the lifespan upper-bound row for the given regime.
/// Throws std::invalid_argument above the critical exponent.
TheoremBound theorem_bound(const RegimeInputs& in);

/// Closed form vs oracle on a randomized grid, plus the anchored spot values.
std::vector<CheckResult> run_lemma_oracle_suite(int points = 100, std::uint64_t seed = 7);

}  // namespace blowup
