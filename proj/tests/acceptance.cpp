// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "blowup/cli_io.hpp"
#include "blowup/cone_geometry.hpp"
#include "blowup/experiments.hpp"
#include "blowup/lifespan_bounds.hpp"
#include "blowup/test_functions.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace blowup;

namespace {

const std::filesystem::path kConfigs = BLOWUP_CONFIG_DIR;

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.passed) ++failures;
  std::printf("%s %2d %s [%.1f s] %s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string failed_checks(const std::vector<CheckResult>& results) {
  std::string s;
  for (const CheckResult& r : results)
    if (!r.passed) s += (s.empty() ? "" : "; ") + r.name + ": " + r.detail;
  return s.empty() ? "all checks passed" : s;
}

SweepOptions options_of(const RunConfig& c, int jobs = 1) {
  SweepOptions o;
  o.jobs = jobs;
  o.auto_extent = c.sweep.auto_extent;
  o.max_extent_doublings = c.sweep.max_extent_doublings;
  return o;
}

SweepResult run_sweep(const RunConfig& c, int jobs = 1) {
  return sweep(c.problem_id, c.problem, c.controls, c.sweep.epsilons, options_of(c, jobs));
}

std::string fit_detail(const SweepResult& sr) {
  std::ostringstream os;
  os << fit_rows(sr).size() << "/" << sr.rows.size() << " blowup rows, power slope " << sr.power.slope << " R2 "
     << sr.power.r2 << ", exp slope " << sr.exponential.slope << " R2 " << sr.exponential.r2;
  return os.str();
}

Outcome power_scaling(const std::string& file, double target, double slope_tol, double r2_min) {
  const SweepResult sr = run_sweep(parse_config(kConfigs / file));
  const bool ok = sr.power.ok && std::abs(sr.power.slope - target) <= slope_tol * std::abs(target) &&
                  sr.power.r2 >= r2_min;
  return {ok, fit_detail(sr)};
}

}  // namespace

int main() {
  criterion(1, "lemma closed form vs saturation oracle", [] {
    const std::vector<CheckResult> suite = run_lemma_oracle_suite(100, 7);
    const double a = key_lemma_bound({1, 1, 1, 0, 2});
    const double b = key_lemma_bound({1, 1, 1, 1, 2});
    const bool anchors = a == 2.0 && std::abs(b - (1.0 + std::log(2.0))) <= 1e-15;
    std::ostringstream os;
    os << failed_checks(suite) << "; theta=0 -> " << a << ", theta=1 -> " << b;
    return Outcome{all_passed(suite) && anchors, os.str()};
  });

  criterion(2, "spectral constants", [] {
    const double sector = make_domain({CrossSectionKind::PlanarSector, 2, std::numbers::pi / 2, 0, 0}).lambda_sigma();
    const double cap = make_domain({CrossSectionKind::SphericalCap, 3, 0, std::numbers::pi / 2, 0}).lambda_sigma();
    const double quarter = make_domain({CrossSectionKind::HalfSpaceProduct, 2, 0, 0, 2}).lambda_sigma();
    const double half = make_domain({CrossSectionKind::HalfSpaceProduct, 3, 0, 0, 1}).lambda_sigma();
    std::ostringstream os;
    os.precision(12);
    os << "sector " << sector << ", cap " << cap << ", k(N-2+k): " << quarter << ", " << half;
    const bool ok = std::abs(sector - 4.0) <= 1e-12 && std::abs(cap - 2.0) <= 1e-8 && quarter == 4.0 &&
                    half == 2.0 && std::abs(cap - half) <= 1e-8;
    return Outcome{ok, os.str()};
  });

  criterion(3, "Hardy suite", [] {
    const std::vector<CrossSectionSpec> domains = {{CrossSectionKind::FullSphere, 3, 0, 0, 0},
                                                   {CrossSectionKind::PlanarSector, 2, std::numbers::pi / 2, 0, 0},
                                                   {CrossSectionKind::HalfLine, 1, 0, 0, 0}};
    bool ok = true;
    std::ostringstream os;
    for (const CrossSectionSpec& s : domains) {
      const HardySuiteReport r = run_hardy_suite(make_domain(s), 1000, 7);
      ok = ok && r.fields == 1000 && r.violations == 0;
      os << to_string(s.kind) << ": " << r.violations << " violations, min ratio " << r.min_ratio << " vs "
         << r.constant << "; ";
    }
    return Outcome{ok, os.str()};
  });

  criterion(4, "cutoff suite", [] {
    const std::vector<CheckResult> suite = run_cutoff_suite();
    return Outcome{all_passed(suite), failed_checks(suite)};
  });

  criterion(5, "subcritical heat scaling", [] { return power_scaling("heat_subcritical.json", -2.0, 0.15, 0.97); });

  criterion(6, "subcritical damped-wave scaling", [] { return power_scaling("damped_wave.json", -2.0, 0.20, 0.95); });

  criterion(7, "critical heat model selection", [] {
    const SweepResult sr = run_sweep(parse_config(kConfigs / "heat_critical.json"));
    const bool ok = sr.power.ok && sr.exponential.ok && sr.exponential.r2 > sr.power.r2 && sr.exponential.slope > 0.0;
    return Outcome{ok, fit_detail(sr)};
  });

  criterion(8, "Schroedinger blowup and criterion trace", [] {
    const RunConfig c = parse_config(kConfigs / "schrodinger.json");
    const RunResult run = run_until_blowup(c.problem, c.controls);
    const PipelineResult pl = criterion_pipeline(c.problem, run, 40);
    std::ostringstream os;
    os << "max|u| " << run.record.max_modulus << " at t " << run.record.t_final << ", min C0 " << pl.criterion.min_C0
       << ", spread " << pl.c0_spread;
    const bool ok = run.record.status == RunStatus::Blowup && run.record.max_modulus >= 1e6 &&
                    std::isfinite(pl.criterion.min_C0) && pl.c0_spread <= 0.2;
    return Outcome{ok, os.str()};
  });

  criterion(9, "criterion-to-bound pipeline", [] {
    RunConfig c = parse_config(kConfigs / "heat_subcritical.json");
    c.problem.initial.epsilon = 0.5;
    const RunResult run = run_until_blowup(c.problem, c.controls);
    const PipelineResult pl = criterion_pipeline(c.problem, run, 40);
    std::ostringstream os;
    os << "delta " << pl.inputs.delta << ", C0 " << pl.inputs.C0 << ", theta " << pl.inputs.theta << ", R1 "
       << pl.inputs.R1 << ": bound " << pl.bound << " vs T " << pl.T;
    const bool ok = std::abs(pl.inputs.theta - 0.5) <= 1e-15 && std::isfinite(pl.inputs.C0) && pl.bound >= pl.T;
    return Outcome{ok, os.str()};
  });

  criterion(10, "sweep determinism across worker counts", [] {
    const RunConfig c = parse_config(kConfigs / "heat_subcritical.json");
    const std::string a = records_csv(run_sweep(c, 1).rows);
    const std::string b = records_csv(run_sweep(c, 3).rows);
    const bool ok = a == b;
    return Outcome{ok, ok ? std::to_string(a.size()) + " bytes identical at jobs 1 and 3" : "CSV output differs"};
  });

  return failures == 0 ? 0 : 1;
}
