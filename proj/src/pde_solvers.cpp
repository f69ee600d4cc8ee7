#include "blowup/pde_solvers.hpp"

#include <Eigen/SparseLU>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace blowup {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd interior_mask(const Grid& grid) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(grid.size());
  for (Eigen::Index i : grid.boundary_nodes()) mask(i) = 0.0;
  return mask;
}

}  // namespace

std::string_view to_string(DampingForm f) {
  switch (f) {
    case DampingForm::Phase: return "phase";
    case DampingForm::Profile: return "profile";
    case DampingForm::Singular: return "singular";
  }
  return "unknown";
}

DampingForm damping_form_from_string(std::string_view name) {
  for (auto f : {DampingForm::Phase, DampingForm::Profile, DampingForm::Singular})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown damping form '" + std::string(name) + "'");
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Blowup: return "blowup";
    case RunStatus::Survived: return "survived";
    case RunStatus::Stalled: return "stalled";
  }
  return "unknown";
}

void CoefficientSpec::validate() const {
  if (tau != 0 && tau != 1) throw std::invalid_argument("tau must be 0 or 1");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("lambda must be finite");
  if (tau == 0) {
    if (form != DampingForm::Phase) throw std::invalid_argument("tau=0 requires the phase form of a");
    if (!(std::abs(a_phase) <= std::numbers::pi / 2 + 1e-15))
      throw std::invalid_argument("a_phase must lie in [-pi/2, pi/2]");
  } else {
    if (form == DampingForm::Phase) throw std::invalid_argument("tau=1 requires the profile or singular form of a");
    if (form == DampingForm::Profile) {
      if (!(a0 >= 0.0)) throw std::invalid_argument("a0 must be nonnegative");
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    } else if (!(V0 >= 0.0)) {
      throw std::invalid_argument("V0 must be nonnegative");
    }
  }
}

double CoefficientSpec::damping(double r) const {
  switch (form) {
    case DampingForm::Phase: return 0.0;
    case DampingForm::Profile: return a0 * std::pow(1.0 + r * r, -alpha / 2.0);
    case DampingForm::Singular: return V0 / r;
  }
  return 0.0;
}

void InitialDataSpec::validate() const {
  if (!(width > 0.0)) throw std::invalid_argument("initial bump width must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

double bump(const InitialDataSpec& d, const Point& x) {
  double dist2 = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double c = static_cast<std::size_t>(k) < d.center.size() ? d.center[k] : 0.0;
    dist2 += (x(k) - c) * (x(k) - c);
  }
  const double q = dist2 / (d.width * d.width);
  return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
}

CrossSectionSpec default_domain(const GridSpec& g) {
  CrossSectionSpec s;
  switch (g.geometry) {
    case GeometryKind::Line: s.kind = CrossSectionKind::FullLine; s.N = 1; break;
    case GeometryKind::HalfLine: s.kind = CrossSectionKind::HalfLine; s.N = 1; break;
    case GeometryKind::Radial:
      s.kind = g.dimension == 1 ? CrossSectionKind::FullLine : CrossSectionKind::FullSphere;
      s.N = g.dimension;
      break;
    case GeometryKind::PolarSector:
      s.kind = CrossSectionKind::PlanarSector;
      s.N = 2;
      s.omega = g.omega;
      break;
  }
  return s;
}

void EvolutionProblem::validate() const {
  coeff.validate();
  grid.validate();
  initial.validate();
  domain.validate();
  if (domain.N != grid.space_dimension())
    throw std::invalid_argument("domain dimension does not match the grid");
  if (coeff.form == DampingForm::Singular &&
      (grid.geometry != GeometryKind::Radial || grid.dimension < 3))
    throw std::invalid_argument("singular damping needs a radial grid with N >= 3");
  const int N = grid.space_dimension();
  if (static_cast<int>(initial.center.size()) > N)
    throw std::invalid_argument("initial center has more coordinates than the grid dimension");
  Point c = Point::Zero(N);
  for (std::size_t k = 0; k < initial.center.size(); ++k) c(static_cast<Eigen::Index>(k)) = initial.center[k];
  const double w = initial.width;
  bool inside = true;
  switch (grid.geometry) {
    case GeometryKind::Line: inside = std::abs(c(0)) + w < grid.extent; break;
    case GeometryKind::HalfLine: inside = c(0) - w >= 0.0 && c(0) + w < grid.extent; break;
    case GeometryKind::Radial: inside = c.norm() + w < grid.extent; break;
    case GeometryKind::PolarSector: {
      const ConeDomain d = make_domain(domain);
      inside = d.contains(c) && d.boundary_distance(c) >= w && c.norm() + w < grid.extent;
      break;
    }
  }
  if (!inside) throw std::invalid_argument("initial data support must lie inside the truncated domain");
}

FieldState initial_state(const Grid& grid, const EvolutionProblem& problem) {
  const Eigen::Index n = grid.size();
  FieldState s;
  s.u = Field::Zero(n);
  if (problem.coeff.tau == 1) s.v = Field::Zero(n);
  const double eps = problem.initial.epsilon;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (grid.is_boundary(i)) continue;
    const double b = bump(problem.initial, grid.point(i));
    s.u(i) = eps * problem.initial.f_amplitude * b;
    if (problem.coeff.tau == 1) s.v(i) = eps * problem.initial.g_amplitude * b;
  }
  return s;
}

Field discrete_laplacian(const Grid& grid, const FieldState& state) {
  return apply_laplacian(grid, state.u);
}

bool is_real_problem(const EvolutionProblem& problem) {
  const CoefficientSpec& c = problem.coeff;
  const InitialDataSpec& d = problem.initial;
  const bool coeff_real = c.tau == 1 || c.a_phase == 0.0;
  return coeff_real && c.lambda.imag() == 0.0 && d.f_amplitude.imag() == 0.0 && d.g_amplitude.imag() == 0.0;
}

namespace {

template <typename Scalar>
Scalar narrow(Complex z) {
  if constexpr (std::is_same_v<Scalar, double>) {
    if (z.imag() != 0.0) throw std::invalid_argument("real stepper given a complex coefficient");
    return z.real();
  } else {
    return z;
  }
}

template <typename Scalar>
VectorOf<Scalar> narrow(const Field& u) {
  if constexpr (std::is_same_v<Scalar, double>) return u.real();
  else return u;
}

template <typename Scalar>
Field widen(const VectorOf<Scalar>& u) {
  return u.template cast<Complex>();
}

// |u|^p with the common integer powers unrolled.
inline double modulus_pow(double a, double p) {
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& u) {
  return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
}

void tridiagonal_entries(const Grid& grid, Eigen::VectorXd& lower, Eigen::VectorXd& diag, Eigen::VectorXd& upper) {
  const Eigen::Index n = grid.size();
  lower = diag = upper = Eigen::VectorXd::Zero(n);
  const auto& L = grid.laplacian();
  for (Eigen::Index k = 0; k < L.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, k); it; ++it) {
      const Eigen::Index r = it.row(), col = it.col();
      if (col == r) diag(r) = it.value();
      else if (col == r - 1) lower(r) = it.value();
      else if (col == r + 1) upper(r) = it.value();
      else throw std::logic_error("banded grid with a non-tridiagonal Laplacian");
    }
}

template <typename Scalar>
VectorOf<Scalar> tridiagonal_apply(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                                   const Eigen::VectorXd& upper, const VectorOf<Scalar>& u) {
  const Eigen::Index n = u.size();
  VectorOf<Scalar> out(n);
  const Scalar* x = u.data();
  Scalar* y = out.data();
  y[0] = diag(0) * x[0] + upper(0) * x[1];
  for (Eigen::Index i = 1; i + 1 < n; ++i) y[i] = lower(i) * x[i - 1] + diag(i) * x[i] + upper(i) * x[i + 1];
  y[n - 1] = lower(n - 1) * x[n - 2] + diag(n - 1) * x[n - 1];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Parabolic stepper

template <typename Scalar>
BasicParabolicStepper<Scalar>::BasicParabolicStepper(const Grid& grid, const CoefficientSpec& coeff)
    : grid_(&grid) {
  coeff.validate();
  if (coeff.tau != 0) throw std::invalid_argument("parabolic stepper needs tau = 0");
  c_ = narrow<Scalar>(1.0 / coeff.phase_coefficient());
  if constexpr (std::is_same_v<Scalar, double>) {
    if (coeff.a_phase != 0.0) throw std::invalid_argument("real stepper needs a = 1");
  }
  lambda_ = narrow<Scalar>(coeff.lambda);
  p_ = coeff.p;
  interior_ = interior_mask(grid);
  if (grid.banded()) tridiagonal_entries(grid, lower_, diag_, upper_);
  else L_ = grid.laplacian().cast<Scalar>();
}

template <typename Scalar>
void BasicParabolicStepper<Scalar>::solve_in_place(Vector& x, double dt) {
  const Scalar k = 0.5 * dt * c_;
  if (grid_->banded()) {
    auto it = banded_.find(dt);
    if (it == banded_.end()) {
      if (banded_.size() > 64) banded_.clear();
      const Vector one = Vector::Ones(diag_.size());
      const Vector lo = -k * lower_.cast<Scalar>();
      const Vector up = -k * upper_.cast<Scalar>();
      const Vector di = one - k * diag_.cast<Scalar>();
      it = banded_.emplace(dt, TridiagonalSolver<Scalar>(lo, di, up)).first;
    }
    it->second.solve_in_place(x);
    return;
  }
  auto it = general_.find(dt);
  if (it == general_.end()) {
    if (general_.size() > 64) general_.clear();
    Eigen::SparseMatrix<Scalar> I(L_.rows(), L_.cols());
    I.setIdentity();
    const Eigen::SparseMatrix<Scalar> A = I - k * L_;
    auto lu = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<Scalar>>>();
    lu->compute(A);
    if (lu->info() != Eigen::Success) throw std::runtime_error("Crank-Nicolson factorization failed");
    it = general_.emplace(dt, std::move(lu)).first;
  }
  x = it->second->solve(x).eval();
  if (it->second->info() != Eigen::Success) throw std::runtime_error("Crank-Nicolson solve failed");
}

template <typename Scalar>
typename BasicParabolicStepper<Scalar>::State BasicParabolicStepper<Scalar>::step(const State& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Eigen::Index n = s.u.size();
  const Vector Lu = grid_->banded() ? tridiagonal_apply<Scalar>(lower_, diag_, upper_, s.u) : Vector(L_ * s.u);
  const Scalar hc = 0.5 * dt * c_;
  const Scalar fc = dt * c_ * lambda_;
  State out;
  out.u.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mask = interior_(i);
    const Scalar half = s.u(i) + hc * (Lu(i) + lambda_ * (mask * modulus_pow(std::abs(s.u(i)), p_)));
    out.u(i) = s.u(i) + hc * Lu(i) + fc * (mask * modulus_pow(std::abs(half), p_));
  }
  solve_in_place(out.u, dt);
  out.t = s.t + dt;
  out.dt = dt;
  return out;
}

template class BasicParabolicStepper<double>;
template class BasicParabolicStepper<Complex>;

FieldState step_parabolic(const Grid& grid, const FieldState& s, const CoefficientSpec& c, double dt) {
  ParabolicStepper stepper(grid, c);
  return stepper.step(s, dt);
}

// ---------------------------------------------------------------------------
// Hyperbolic stepper

template <typename Scalar>
BasicHyperbolicStepper<Scalar>::BasicHyperbolicStepper(const Grid& grid, const CoefficientSpec& coeff)
    : grid_(&grid) {
  coeff.validate();
  if (coeff.tau != 1) throw std::invalid_argument("hyperbolic stepper needs tau = 1");
  lambda_ = narrow<Scalar>(coeff.lambda);
  p_ = coeff.p;
  interior_ = interior_mask(grid);
  if (grid.banded()) tridiagonal_entries(grid, lower_, diag_, upper_);
  damping_.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.radius(i);
    if (coeff.form == DampingForm::Singular && r == 0.0) {
      // Mean of V₀/|x| over the origin control volume, a ball of radius h/2.
      const int N = grid.spec().space_dimension();
      damping_(i) = coeff.V0 * N / ((N - 1) * 0.5 * grid.spec().h);
    } else {
      damping_(i) = coeff.damping(r);
    }
  }
}

template <typename Scalar>
double BasicHyperbolicStepper<Scalar>::cfl_limit() const {
  return 0.9 * 2.0 / std::sqrt(grid_->spectral_bound());
}

template <typename Scalar>
typename BasicHyperbolicStepper<Scalar>::Vector BasicHyperbolicStepper<Scalar>::force(const Vector& u) const {
  Vector f = grid_->banded() ? tridiagonal_apply<Scalar>(lower_, diag_, upper_, u)
                             : Vector(grid_->laplacian().template cast<Scalar>() * u);
  for (Eigen::Index i = 0; i < u.size(); ++i) f(i) += lambda_ * (interior_(i) * modulus_pow(std::abs(u(i)), p_));
  return f;
}

template <typename Scalar>
typename BasicHyperbolicStepper<Scalar>::State BasicHyperbolicStepper<Scalar>::step(const State& s, double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (dt > cfl_limit() * (1.0 + 1e-12))
    throw std::invalid_argument("dt " + std::to_string(dt) + " violates the CFL limit " +
                                std::to_string(cfl_limit()));
  const Eigen::ArrayXd d = (1.0 - 0.25 * dt * damping_.array()) / (1.0 + 0.25 * dt * damping_.array());
  State out;
  Vector v = (s.v.array() * d.cast<Scalar>()).matrix();
  v += (0.5 * dt) * force(s.u);
  out.u = s.u + dt * v;
  v += (0.5 * dt) * force(out.u);
  out.v = (v.array() * d.cast<Scalar>()).matrix();
  out.t = s.t + dt;
  out.dt = dt;
  return out;
}

template <typename Scalar>
double BasicHyperbolicStepper<Scalar>::energy(const State& s, double dt) const {
  const Eigen::VectorXd& w = grid_->weights();
  const Vector Lu = grid_->laplacian().template cast<Scalar>() * s.u;
  const double kinetic = (w.array() * s.v.cwiseAbs2().array()).sum();
  double potential = 0.0;
  for (Eigen::Index i = 0; i < s.u.size(); ++i) potential -= w(i) * std::real(std::conj(s.u(i)) * Lu(i));
  const double shadow = (w.array() * Lu.cwiseAbs2().array()).sum();
  return 0.5 * kinetic + 0.5 * potential - dt * dt / 8.0 * shadow;
}

template class BasicHyperbolicStepper<double>;
template class BasicHyperbolicStepper<Complex>;

FieldState step_hyperbolic(const Grid& grid, const FieldState& s, const CoefficientSpec& c, double dt) {
  return HyperbolicStepper(grid, c).step(s, dt);
}

// ---------------------------------------------------------------------------
// Controller

void Controls::validate() const {
  if (!(M >= 1e3)) throw std::invalid_argument("threshold M must be at least 1e3");
  if (dt_initial < 0.0 || dt_max < 0.0) throw std::invalid_argument("time steps must be nonnegative");
  if (!(dt_min > 0.0)) throw std::invalid_argument("dt_min must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  if (!(max_growth > 0.0) || !(regrow_below >= 0.0) || regrow_below >= max_growth)
    throw std::invalid_argument("growth controls must satisfy 0 <= regrow_below < max_growth");
  if (snapshot_interval < 0.0) throw std::invalid_argument("snapshot_interval must be nonnegative");
  if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
}

double extrapolate_lifespan(const std::array<double, 4>& T_at_M, double p, int tau) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < kThresholds.size(); ++k) {
    if (!std::isfinite(T_at_M[k])) continue;
    const double x = std::pow(kThresholds[k], -(p - 1.0) / (1.0 + tau));
    sx += x;
    sy += T_at_M[k];
    sxx += x * x;
    sxy += x * T_at_M[k];
    ++n;
  }
  if (n < 2) return kNaN;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return (sy - slope * sx) / n;
}

namespace {

// Far tails of the solution decay into the subnormal range, where arithmetic
// is two orders of magnitude slower; flush them to zero for the run.
class FlushDenormals {
 public:
  FlushDenormals() {
#if defined(__SSE2__)
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040);  // FTZ | DAZ
#endif
  }
  ~FlushDenormals() {
#if defined(__SSE2__)
    _mm_setcsr(saved_);
#endif
  }
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

template <typename Scalar>
RunResult run_impl(const EvolutionProblem& problem, const Controls& controls) {
  using State = BasicFieldState<Scalar>;
  const FlushDenormals flush;
  const Grid grid(problem.grid);
  const CoefficientSpec& c = problem.coeff;
  const double p = c.p;
  const int tau = c.tau;

  std::optional<BasicParabolicStepper<Scalar>> parabolic;
  std::optional<BasicHyperbolicStepper<Scalar>> hyperbolic;
  double dt_max = controls.dt_max;
  if (tau == 0) {
    parabolic.emplace(grid, c);
    // Keeps I + (dt/2)Δ_h entrywise nonnegative (h² on a line).
    if (dt_max == 0.0) dt_max = 4.0 / grid.spectral_bound();
  } else {
    hyperbolic.emplace(grid, c);
    if (dt_max == 0.0) dt_max = hyperbolic->cfl_limit();
    if (dt_max > hyperbolic->cfl_limit() * (1.0 + 1e-12))
      throw std::invalid_argument("dt_max violates the CFL limit");
  }
  double dt = controls.dt_initial > 0.0 ? std::min(controls.dt_initial, dt_max) : dt_max;

  RunResult result;
  BlowupRecord& rec = result.record;
  rec.epsilon = problem.initial.epsilon;
  rec.p = p;
  rec.tau = tau;
  rec.alpha = c.form == DampingForm::Profile ? c.alpha : (c.form == DampingForm::Singular ? 1.0 : 0.0);
  rec.zeta = tau == 0 ? c.a_phase : 0.0;
  rec.h = problem.grid.h;
  rec.T_at_M.fill(kNaN);
  rec.T_extrapolated = kNaN;

  State state;
  {
    const FieldState init = initial_state(grid, problem);
    state.u = narrow<Scalar>(init.u);
    if (tau == 1) state.v = narrow<Scalar>(init.v);
  }
  state.dt = dt;
  double m_old = max_abs(state.u);
  auto min_real = [](const VectorOf<Scalar>& u) {
    if constexpr (std::is_same_v<Scalar, double>) return u.minCoeff();
    else return u.real().minCoeff();
  };
  rec.min_real = min_real(state.u);
  auto ring_max = [&](const VectorOf<Scalar>& u) {
    double r = 0.0;
    for (Eigen::Index i : grid.outer_ring()) r = std::max(r, std::abs(u(i)));
    return r;
  };
  rec.boundary_max = ring_max(state.u);

  const double snap = controls.snapshot_interval;
  double next_snap = snap;
  if (snap > 0.0) result.snapshots.push_back({0.0, state.u.cwiseAbs()});

  const double q_exp = (1.0 - p) / (1.0 + tau);
  RunStatus status = RunStatus::Survived;
  while (true) {
    if (state.t >= controls.t_max) {
      status = RunStatus::Survived;
      break;
    }
    if (rec.steps >= controls.max_steps) {
      status = RunStatus::Stalled;
      break;
    }
    const double step_dt = std::min(dt, controls.t_max - state.t);
    State next = tau == 0 ? parabolic->step(state, step_dt) : hyperbolic->step(state, step_dt);
    const double m_new = max_abs(next.u);
    const bool too_fast = !std::isfinite(m_new) || (m_old > 0.0 && m_new > m_old * (1.0 + controls.max_growth));
    if (too_fast) {
      dt *= 0.5;
      if (dt < controls.dt_min * std::pow(std::max(m_old, 1.0), q_exp)) {
        status = RunStatus::Stalled;
        break;
      }
      continue;
    }

    ++rec.steps;
    for (std::size_t k = 0; k < kThresholds.size(); ++k) {
      const double M = kThresholds[k];
      if (std::isnan(rec.T_at_M[k]) && m_old < M && m_new >= M) {
        // Linear interpolation in m^{(1−p)/(1+τ)}, exact for the comparison ODE.
        const double q0 = std::pow(m_old, q_exp), q1 = std::pow(m_new, q_exp), qM = std::pow(M, q_exp);
        rec.T_at_M[k] = state.t + step_dt * (q0 - qM) / (q0 - q1);
      }
    }
    const double growth = m_old > 0.0 ? m_new / m_old - 1.0 : 0.0;
    state = std::move(next);
    m_old = m_new;
    rec.boundary_max = std::max(rec.boundary_max, ring_max(state.u));
    rec.min_real = std::min(rec.min_real, min_real(state.u));
    if (snap > 0.0 && state.t >= next_snap) {
      result.snapshots.push_back({state.t, state.u.cwiseAbs()});
      while (next_snap <= state.t) next_snap += snap;
    }
    if (m_new >= controls.M) {
      status = RunStatus::Blowup;
      break;
    }
    if (growth < controls.regrow_below && 2.0 * dt <= dt_max * (1.0 + 1e-12)) dt *= 2.0;
  }

  if (snap > 0.0 && result.snapshots.back().t < state.t)
    result.snapshots.push_back({state.t, state.u.cwiseAbs()});
  rec.status = status;
  rec.dt_final = dt;
  rec.t_final = state.t;
  rec.max_modulus = m_old;
  if (status == RunStatus::Blowup) rec.T_extrapolated = extrapolate_lifespan(rec.T_at_M, p, tau);
  result.final_state.u = widen<Scalar>(state.u);
  if (tau == 1) result.final_state.v = widen<Scalar>(state.v);
  result.final_state.t = state.t;
  result.final_state.dt = dt;
  return result;
}

}  // namespace

RunResult run_until_blowup(const EvolutionProblem& problem, const Controls& controls) {
  problem.validate();
  controls.validate();
  return is_real_problem(problem) ? run_impl<double>(problem, controls) : run_impl<Complex>(problem, controls);
}

// ---------------------------------------------------------------------------
// Weighted functionals

Eigen::VectorXd nodal_weight(const Grid& grid, const ConeDomain& domain) {
  const WeightPhi phi{domain};
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = phi_eval(phi, grid.point(i));
  return out;
}

double weighted_initial_mass(const EvolutionProblem& problem) {
  problem.validate();
  if (problem.coeff.lambda == Complex{}) throw std::invalid_argument("weighted initial mass needs lambda != 0");
  const Grid grid(problem.grid);
  const Eigen::VectorXd phi = nodal_weight(grid, make_domain(problem.domain));
  const CoefficientSpec& c = problem.coeff;
  const InitialDataSpec& d = problem.initial;
  Complex total{};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid.is_boundary(i)) continue;
    const double b = bump(d, grid.point(i)) * phi(i) * grid.weights()(i);
    if (b == 0.0) continue;
    if (c.tau == 0) total += c.phase_coefficient() * d.f_amplitude * b;
    else total += (d.g_amplitude + c.damping(grid.radius(i)) * d.f_amplitude) * b;
  }
  return d.epsilon * (total / c.lambda).real();
}

FunctionalTrace functional_trace(const Grid& grid, const std::vector<Snapshot>& snapshots,
                                 const Eigen::VectorXd& phi, double p, const CutoffFamily& fam,
                                 const std::vector<double>& radii) {
  fam.validate();
  FunctionalTrace tr;
  tr.radii = radii;
  tr.y.assign(radii.size(), 0.0);
  tr.m.assign(radii.size(), 0.0);
  if (radii.empty()) return tr;
  if (snapshots.empty() || snapshots.front().t != 0.0)
    throw TraceError("snapshots must start at t = 0");
  for (std::size_t k = 1; k < snapshots.size(); ++k)
    if (!(snapshots[k].t > snapshots[k - 1].t)) throw TraceError("snapshot times must increase");
  // ψ_R vanishes for t ≥ R − 1 since the region coordinate is at least 1.
  const double R_max = *std::max_element(radii.begin(), radii.end());
  if (snapshots.back().t < R_max - 1.0)
    throw TraceError("snapshots end before the support of the largest cutoff");

  const Eigen::Index n = grid.size();
  Eigen::VectorXd coord(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = grid.radius(i);
    coord(i) = std::pow(1.0 + r * r, (2.0 - fam.alpha) / 2.0);
  }
  const double power = fam.power();
  const TransitionProfile& eta = fam.profile;

  const std::size_t S = snapshots.size();
  const std::size_t nr = radii.size();
  // I[k][j]: spatial integrals at snapshot k, radius j.
  std::vector<std::vector<double>> Im(S, std::vector<double>(nr, 0.0));
  std::vector<std::vector<double>> Iy(S, std::vector<double>(nr, 0.0));
  std::vector<Eigen::Index> active;
  std::vector<double> wk;
  for (std::size_t k = 0; k < S; ++k) {
    const double t = snapshots[k].t;
    if (t >= R_max - 1.0 && k > 0 && snapshots[k - 1].t >= R_max - 1.0) break;
    active.clear();
    wk.clear();
    const Eigen::VectorXd& mod = snapshots[k].modulus;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = grid.weights()(i) * std::pow(mod(i), p) * phi(i);
      if (w > 0.0 && std::isfinite(w)) {
        active.push_back(i);
        wk.push_back(w);
      }
    }
    for (std::size_t j = 0; j < nr; ++j) {
      const double R = radii[j];
      double sm = 0.0, sy = 0.0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const double s = (coord(active[a]) + t) / R;
        if (s >= 1.0) continue;
        const double e = std::pow(eta.value(s), power);
        sm += wk[a] * e;
        if (s >= 0.5) sy += wk[a] * e;
      }
      Im[k][j] = sm;
      Iy[k][j] = sy;
    }
  }

  auto trapezoid = [&](const std::vector<std::vector<double>>& I, std::size_t j, std::size_t stride) {
    double total = 0.0;
    std::size_t prev = 0;
    for (std::size_t k = stride; k < S + stride - 1; k += stride) {
      const std::size_t cur = std::min(k, S - 1);
      total += 0.5 * (snapshots[cur].t - snapshots[prev].t) * (I[prev][j] + I[cur][j]);
      prev = cur;
      if (cur == S - 1) break;
    }
    return total;
  };

  for (std::size_t j = 0; j < nr; ++j) {
    tr.m[j] = trapezoid(Im, j, 1);
    tr.y[j] = trapezoid(Iy, j, 1);
    if (!std::isfinite(tr.m[j])) throw TraceError("trace mass is not finite; radius reaches the blowup time");
  }
  // Refinement check against the trace scale: drop every other snapshot.
  if (S >= 5) {
    const double scale_m = std::max(*std::max_element(tr.m.begin(), tr.m.end()), 1e-300);
    const double scale_y = std::max(*std::max_element(tr.y.begin(), tr.y.end()), 1e-300);
    for (std::size_t j = 0; j < nr; ++j) {
      const double em = std::abs(trapezoid(Im, j, 2) - tr.m[j]) / scale_m;
      const double ey = std::abs(trapezoid(Iy, j, 2) - tr.y[j]) / scale_y;
      if (em > 0.02 || ey > 0.02)
        throw TraceError("snapshot density too low at R = " + std::to_string(radii[j]));
    }
  }
  tr.validate();
  return tr;
}

}  // namespace blowup
