#include "blowup/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace blowup {

namespace {

FitResult least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*hi - *lo > 1e-12 * std::max(1.0, std::abs(*hi))) || !(sxx > 0.0))
    throw std::invalid_argument("fit abscissa span is degenerate");
  FitResult f;
  f.ok = true;
  f.status = "ok";
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return f;
}

void check_rows(const LifespanRows& rows) {
  if (rows.size() < 5) throw std::invalid_argument("a fit needs at least 5 rows");
  for (const auto& [eps, T] : rows)
    if (!(eps > 0.0) || !(T > 0.0) || !std::isfinite(T))
      throw std::invalid_argument("fit rows need positive finite epsilon and T");
}

}  // namespace

FitResult fit_power_law(const LifespanRows& rows) {
  check_rows(rows);
  std::vector<double> x, y;
  for (const auto& [eps, T] : rows) {
    x.push_back(std::log(eps));
    y.push_back(std::log(T));
  }
  return least_squares(x, y);
}

FitResult fit_exponential_law(const LifespanRows& rows, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("exponential fit needs p > 1");
  check_rows(rows);
  std::vector<double> x, y;
  for (const auto& [eps, T] : rows) {
    x.push_back(std::pow(eps, -(p - 1.0)));
    y.push_back(std::log(T));
  }
  return least_squares(x, y);
}

LifespanRows fit_rows(const SweepResult& sr) {
  LifespanRows rows;
  for (const auto& r : sr.rows)
    if (r.status == RunStatus::Blowup && std::isfinite(r.T_extrapolated) && r.T_extrapolated > 0.0)
      rows.emplace_back(r.epsilon, r.T_extrapolated);
  return rows;
}

void fit_sweep(SweepResult& sr) {
  const LifespanRows rows = fit_rows(sr);
  const std::string skipped = "skipped: " + std::to_string(rows.size()) + " blowup rows, 5 required";
  sr.power = {false, 0, 0, 0, skipped};
  sr.exponential = {false, 0, 0, 0, skipped};
  if (rows.size() < 5) return;
  const double p = sr.rows.front().p;
  try {
    sr.power = fit_power_law(rows);
    sr.exponential = fit_exponential_law(rows, p);
  } catch (const std::invalid_argument& e) {
    sr.power = {false, 0, 0, 0, std::string("skipped: ") + e.what()};
    sr.exponential = sr.power;
  }
}

SweepResult sweep(const std::string& problem_id, const EvolutionProblem& problem,
                  const Controls& controls, const std::vector<double>& epsilons,
                  const SweepOptions& options) {
  problem.validate();
  controls.validate();
  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  if (eps.size() < 5) throw std::invalid_argument("sweep needs at least 5 distinct epsilon values");
  if (!(eps.front() > 0.0)) throw std::invalid_argument("sweep epsilons must be positive");
  if (eps.back() < 2.0 * eps.front() * (1.0 - 1e-12))
    throw std::invalid_argument("sweep epsilons must span at least a factor of 2");
  if (options.jobs < 1) throw std::invalid_argument("jobs must be at least 1");

  SweepResult sr;
  sr.problem_id = problem_id;
  sr.rows.resize(eps.size());
  sr.extents.resize(eps.size());

  auto run_one = [&](std::size_t k) {
    EvolutionProblem pr = problem;
    pr.initial.epsilon = eps[k];
    RunResult res = run_until_blowup(pr, controls);
    for (int d = 0; options.auto_extent && d < options.max_extent_doublings &&
                    res.record.status != RunStatus::Stalled && !(res.record.boundary_max < options.hygiene);
         ++d) {
      pr.grid.extent *= 2.0;
      res = run_until_blowup(pr, controls);
    }
    sr.rows[k] = res.record;
    sr.extents[k] = pr.grid.extent;
  };

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t k = next++; k < eps.size(); k = next++) {
      try {
        run_one(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(options.jobs, static_cast<int>(eps.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  fit_sweep(sr);
  if (fit_rows(sr).empty()) sr.verdict = "no blowup observed";
  return sr;
}

std::string regime_verdict(const SweepResult& sr, const TheoremBound& predicted,
                           const VerdictTolerance& tol) {
  if (fit_rows(sr).empty()) return "no blowup observed";
  if (!sr.power.ok || !sr.exponential.ok) return "insufficient data";
  const bool exp_wins = sr.exponential.r2 > sr.power.r2;
  if (predicted.form == BoundForm::Exponential) {
    const bool ok = exp_wins && sr.exponential.slope > 0.0 && sr.exponential.r2 >= tol.r2;
    return ok ? "consistent" : "inconsistent";
  }
  const double target = predicted.exponent;
  const bool ok = !exp_wins && std::abs(sr.power.slope - target) <= tol.slope * std::abs(target);
  return ok ? "consistent" : "inconsistent";
}

namespace {

double damping_decay(const CoefficientSpec& c) {
  if (c.tau == 0) return 0.0;
  return c.form == DampingForm::Singular ? 1.0 : c.alpha;
}

}  // namespace

double scaling_theta(const EvolutionProblem& problem) {
  const double gamma = make_domain(problem.domain).gamma();
  const double p = problem.coeff.p;
  const double dim = problem.domain.N + gamma - damping_decay(problem.coeff);
  return std::max(0.0, 1.0 / (p - 1.0) - 0.5 * dim);
}

PipelineResult criterion_pipeline(const EvolutionProblem& problem, const RunResult& run, int points) {
  if (run.record.status != RunStatus::Blowup) throw std::invalid_argument("criterion pipeline needs a blowup run");
  if (run.snapshots.empty()) throw std::invalid_argument("criterion pipeline needs snapshots");
  if (points < 2) throw std::invalid_argument("criterion pipeline needs at least 2 radii");
  PipelineResult out;
  out.T = std::isfinite(run.record.T_extrapolated) ? run.record.T_extrapolated : run.record.t_final;
  const double R1 = 2.0 * problem.initial.width;
  const double R_max = 0.98 * out.T;
  if (!(R_max > R1)) throw std::invalid_argument("lifespan too short for a trace beyond R1 = 2 width");

  std::vector<double> radii;
  const double lo = std::log(R1), hi = std::log(R_max);
  for (int i = 0; i < points; ++i) radii.push_back(std::exp(lo + (hi - lo) * i / (points - 1)));

  const Grid grid(problem.grid);
  CutoffFamily fam;
  fam.p = problem.coeff.p;
  fam.alpha = damping_decay(problem.coeff);
  const Eigen::VectorXd phi = nodal_weight(grid, make_domain(problem.domain));
  out.trace = functional_trace(grid, run.snapshots, phi, fam.p, fam, radii);

  out.inputs = {weighted_initial_mass(problem), 1.0, R1, scaling_theta(problem), problem.coeff.p};
  if (!(out.inputs.delta > 0.0)) throw std::invalid_argument("weighted initial mass is not positive");
  out.criterion = criterion_check(out.trace, out.inputs, out.T);
  out.inputs.C0 = out.criterion.min_C0;
  out.bound = std::isfinite(out.inputs.C0) ? key_lemma_bound(out.inputs) : std::numeric_limits<double>::infinity();

  std::vector<double> c0 = out.criterion.required_C0;
  std::sort(c0.begin(), c0.end());
  const std::size_t n = c0.size();
  const double median = n % 2 ? c0[n / 2] : 0.5 * (c0[n / 2 - 1] + c0[n / 2]);
  for (double c : c0) out.c0_spread = std::max(out.c0_spread, std::abs(c / median - 1.0));
  return out;
}

}  // namespace blowup
