#pragma once

#include "blowup/lifespan_bounds.hpp"
#include "blowup/pde_solvers.hpp"

#include <string>
#include <utility>
#include <vector>

namespace blowup {

struct FitResult {
  bool ok = false;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// "ok", or why the fit was skipped.
  std::string status;
};

/// (ε, T) pairs.
using LifespanRows = std::vector<std::pair<double, double>>;

/// Least squares of log T on log ε. Throws std::invalid_argument with fewer
/// than 5 rows or a degenerate abscissa.
FitResult fit_power_law(const LifespanRows& rows);
/// Least squares of log T on ε^{−(p−1)}. Same preconditions.
FitResult fit_exponential_law(const LifespanRows& rows, double p);

struct SweepOptions {
  int jobs = 1;
  /// Double the grid extent and rerun when the boundary-hygiene bound fails.
  bool auto_extent = true;
  int max_extent_doublings = 3;
  double hygiene = 1e-8;
};

struct SweepResult {
  std::string problem_id;
  /// Sorted by ε.
  std::vector<BlowupRecord> rows;
  /// Grid extent finally used for each row.
  std::vector<double> extents;
  FitResult power;
  FitResult exponential;
  std::string verdict;
};

/// Rows entering the fits: blowup status with a finite extrapolated lifespan.
LifespanRows fit_rows(const SweepResult& sr);

/// Runs run_until_blowup per ε on `options.jobs` workers and fits both laws.
/// Output does not depend on the worker count. Requires at least 5 distinct
/// ε spanning a factor of 2.
SweepResult sweep(const std::string& problem_id, const EvolutionProblem& problem,
                  const Controls& controls, const std::vector<double>& epsilons,
                  const SweepOptions& options = {});

/// Fits both laws on an existing row set (used by sweep and by synthetic tests).
void fit_sweep(SweepResult& sr);

struct VerdictTolerance {
  /// Relative tolerance on power-law slopes.
  double slope = 0.15;
  /// Minimum R² of the winning model in the exponential regime.
  double r2 = 0.95;
};

/// "consistent", "inconsistent", "no blowup observed" or "insufficient data".
std::string regime_verdict(const SweepResult& sr, const TheoremBound& predicted,
                           const VerdictTolerance& tol = {});

/// Scaling exponent of the criterion: max(0, 1/(p−1) − (N+γ−α)/2), with α the
/// damping decay (0 for τ = 0, 1 for singular damping).
double scaling_theta(const EvolutionProblem& problem);

struct PipelineResult {
  FunctionalTrace trace;
  CriterionResult criterion;
  /// δ from the weighted initial mass, C₀ = criterion.min_C0.
  BoundInputs inputs;
  double bound = 0.0;
  /// Simulated lifespan the radii are capped by.
  double T = 0.0;
  /// max_i |C₀,i / median − 1| over the tested radii.
  double c0_spread = 0.0;
};

/// Trace of a blown-up run on `points` log-spaced radii from R₁ = 2·width
/// to 0.98·T, the criterion check on it, and the resulting lemma bound.
/// Throws std::invalid_argument when the run did not blow up, has no
/// snapshots, or T ≤ R₁.
PipelineResult criterion_pipeline(const EvolutionProblem& problem, const RunResult& run, int points = 40);

}  // namespace blowup
