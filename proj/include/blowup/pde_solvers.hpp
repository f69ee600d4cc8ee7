#pragma once

#include "blowup/cone_geometry.hpp"
#include "blowup/grid.hpp"
#include "blowup/lifespan_bounds.hpp"
#include "blowup/test_functions.hpp"

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace blowup {

using Complex = std::complex<double>;
using Field = Eigen::VectorXcd;

enum class DampingForm {
  /// τ = 0: a = e^{iζ}.
  Phase,
  /// τ = 1: a(x) = a₀⟨x⟩^{−α}.
  Profile,
  /// τ = 1: a(x) = V₀|x|^{−1}.
  Singular,
};

std::string_view to_string(DampingForm f);
DampingForm damping_form_from_string(std::string_view name);

/// Coefficients of τ∂t²u − Δu + a(x)∂t u = λ|u|^p.
struct CoefficientSpec {
  int tau = 0;
  DampingForm form = DampingForm::Phase;
  double a_phase = 0.0;
  double a0 = 1.0;
  double alpha = 0.0;
  double V0 = 0.0;
  Complex lambda{1.0, 0.0};
  double p = 2.0;

  void validate() const;
  /// e^{iζ}; only meaningful for τ = 0.
  Complex phase_coefficient() const { return std::polar(1.0, a_phase); }
  /// a(x) for the τ = 1 forms at |x| = r.
  double damping(double r) const;
};

/// u(x,0) = ε f, ∂t u(x,0) = ε g, with f and g multiples of one smooth bump
/// exp(1 − 1/(1 − |x−c|²/w²)).
struct InitialDataSpec {
  std::vector<double> center;
  double width = 1.0;
  Complex f_amplitude{1.0, 0.0};
  Complex g_amplitude{0.0, 0.0};
  double epsilon = 1.0;

  void validate() const;
};

/// The bump profile at x (sup = 1 at the center).
double bump(const InitialDataSpec& d, const Point& x);

struct EvolutionProblem {
  CoefficientSpec coeff;
  GridSpec grid;
  InitialDataSpec initial;
  /// Cone whose weight Φ enters the weighted initial mass and traces.
  CrossSectionSpec domain;

  void validate() const;
};

/// Cone cross-section implied by a grid geometry (full line, half-line,
/// full space in radial coordinates, planar sector).
CrossSectionSpec default_domain(const GridSpec& g);

template <typename Scalar>
using VectorOf = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct BasicFieldState {
  VectorOf<Scalar> u;
  /// ∂t u; empty for τ = 0.
  VectorOf<Scalar> v;
  double t = 0.0;
  double dt = 0.0;
};

using FieldState = BasicFieldState<Complex>;

FieldState initial_state(const Grid& grid, const EvolutionProblem& problem);

Field discrete_laplacian(const Grid& grid, const FieldState& state);

/// True when the problem stays real-valued, so the real steppers apply.
bool is_real_problem(const EvolutionProblem& problem);

/// Time stepper for τ = 0: Crank–Nicolson diffusion with the nonlinearity
/// evaluated explicitly at the half step. Factorizations are cached per dt.
/// The real instantiation requires a real a and λ.
template <typename Scalar>
class BasicParabolicStepper {
 public:
  using Vector = VectorOf<Scalar>;
  using State = BasicFieldState<Scalar>;

  BasicParabolicStepper(const Grid& grid, const CoefficientSpec& coeff);
  State step(const State& s, double dt);

 private:
  void solve_in_place(Vector& x, double dt);

  const Grid* grid_;
  Scalar c_;  // a^{-1}
  Scalar lambda_;
  double p_;
  Eigen::VectorXd interior_, lower_, diag_, upper_;
  Eigen::SparseMatrix<Scalar> L_;
  std::map<double, TridiagonalSolver<Scalar>> banded_;
  std::map<double, std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<Scalar>>>> general_;
};

/// Time stepper for τ = 1: a Crank–Nicolson half step of the damping, a
/// velocity-Verlet step of u'' = Δu + λ|u|^p, and another damping half step.
template <typename Scalar>
class BasicHyperbolicStepper {
 public:
  using Vector = VectorOf<Scalar>;
  using State = BasicFieldState<Scalar>;

  BasicHyperbolicStepper(const Grid& grid, const CoefficientSpec& coeff);

  State step(const State& s, double dt) const;
  /// Largest admissible dt: 0.9 · 2/√ρ(Δ_h).
  double cfl_limit() const;
  /// ½‖v‖² + ½⟨u, −Δ_h u⟩ − (dt²/8)‖Δ_h u‖²; conserved exactly by the
  /// Verlet step when λ = 0 and a = 0.
  double energy(const State& s, double dt) const;

 private:
  Vector force(const Vector& u) const;

  const Grid* grid_;
  Scalar lambda_;
  double p_;
  Eigen::VectorXd damping_, interior_, lower_, diag_, upper_;
};

using ParabolicStepper = BasicParabolicStepper<Complex>;
using HyperbolicStepper = BasicHyperbolicStepper<Complex>;

FieldState step_parabolic(const Grid& grid, const FieldState& s, const CoefficientSpec& c, double dt);
/// Throws std::invalid_argument when dt exceeds the CFL limit.
FieldState step_hyperbolic(const Grid& grid, const FieldState& s, const CoefficientSpec& c, double dt);

inline constexpr std::array<double, 4> kThresholds{1e3, 1e4, 1e5, 1e6};

struct Controls {
  /// Stop level; must be at least 1e3 and at least every recorded threshold used.
  double M = 1e6;
  double dt_initial = 0.0;  // 0: dt_max
  double dt_max = 0.0;      // 0: h² for τ = 0, the CFL limit for τ = 1
  /// Stall when dt falls below dt_min · max(1, max|u|)^{(1−p)/(1+τ)}.
  double dt_min = 1e-9;
  double t_max = 1e3;
  /// Halve dt if max|u| grows by more than this fraction in one step.
  double max_growth = 0.2;
  /// Double dt (up to dt_max) if growth stays below this fraction.
  double regrow_below = 0.05;
  /// Spacing of stored |u| snapshots; 0 disables storage.
  double snapshot_interval = 0.0;
  long max_steps = 50'000'000;

  void validate() const;
};

enum class RunStatus { Blowup, Survived, Stalled };
std::string_view to_string(RunStatus s);

struct Snapshot {
  double t = 0.0;
  Eigen::VectorXd modulus;
};

struct BlowupRecord {
  double epsilon = 0.0;
  double p = 0.0;
  int tau = 0;
  double alpha = 0.0;
  double zeta = 0.0;
  RunStatus status = RunStatus::Survived;
  /// Crossing times of kThresholds; NaN when not reached.
  std::array<double, 4> T_at_M{};
  double T_extrapolated = 0.0;
  double dt_final = 0.0;
  double h = 0.0;
  long steps = 0;
  /// Largest |u| on the nodes next to the truncation boundary over the run.
  double boundary_max = 0.0;
  double t_final = 0.0;
  double max_modulus = 0.0;
  /// Smallest Re u seen (positivity audit for real data).
  double min_real = 0.0;
};

struct RunResult {
  BlowupRecord record;
  std::vector<Snapshot> snapshots;
  FieldState final_state;
};

RunResult run_until_blowup(const EvolutionProblem& problem, const Controls& controls);

/// Least-squares fit of T_M = T∞ − c·M^{−(p−1)/(1+τ)} over the reached
/// thresholds; NaN with fewer than two.
double extrapolate_lifespan(const std::array<double, 4>& T_at_M, double p, int tau);

/// Φ at every node of the grid.
Eigen::VectorXd nodal_weight(const Grid& grid, const ConeDomain& domain);

/// δ = ε Re(λ^{−1} a ∫fΦ) for τ = 0 and ε Re(λ^{−1}∫(g + af)Φ) for τ = 1.
/// Throws std::invalid_argument for λ = 0.
double weighted_initial_mass(const EvolutionProblem& problem);

/// Space-time trapezoid quadrature of w = |u|^p Φ against ψ_R and ψ*_R.
/// Throws TraceError when the snapshots do not start at t = 0, do not cover
/// the time support of the largest ψ_R, or halving the snapshot density
/// changes a mass by more than 2%.
FunctionalTrace functional_trace(const Grid& grid, const std::vector<Snapshot>& snapshots,
                                 const Eigen::VectorXd& phi, double p, const CutoffFamily& fam,
                                 const std::vector<double>& radii);

}  // namespace blowup
