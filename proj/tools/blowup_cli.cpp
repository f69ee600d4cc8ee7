#include "blowup/cli_io.hpp"
#include "blowup/cone_geometry.hpp"
#include "blowup/experiments.hpp"
#include "blowup/lifespan_bounds.hpp"
#include "blowup/pde_solvers.hpp"
#include "blowup/test_functions.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

using namespace blowup;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kFault = 2;

struct Globals {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

RunConfig load(const Globals& g) {
  if (g.config.empty()) throw std::invalid_argument("this subcommand needs --config");
  RunConfig c = parse_config(g.config);
  if (!g.out_dir.empty()) c.out_dir = g.out_dir;
  if (g.seed) c.seed = *g.seed;
  return c;
}

std::filesystem::path out_path(const RunConfig& c, const std::string& suffix) {
  return std::filesystem::path(c.out_dir) / (c.problem_id + suffix);
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int report(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " | " << r.detail << '\n';
  return all_passed(results) ? kOk : kInvalid;
}

RegimeInputs regime_of(const EvolutionProblem& pr) {
  RegimeInputs in;
  in.N = pr.domain.N;
  in.gamma = make_domain(pr.domain).gamma();
  in.p = pr.coeff.p;
  in.singular = pr.coeff.form == DampingForm::Singular;
  in.alpha = pr.coeff.form == DampingForm::Profile ? pr.coeff.alpha : (in.singular ? 1.0 : 0.0);
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cone-domain blowup laboratory"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out-dir", g.out_dir, "Directory for emitted files");
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed");
  app.add_option("--jobs", g.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  // eigen
  auto* eigen = app.add_subcommand("eigen", "Spectral constant, gamma and Phi of a cone");
  std::string kind_name;
  CrossSectionSpec spec;
  double eigen_alpha = 0.0;
  eigen->add_option("--kind", kind_name, "full-sphere | half-line | full-line | planar-sector | spherical-cap | half-space-product");
  eigen->add_option("--N", spec.N, "Dimension");
  eigen->add_option("--omega", spec.omega, "Sector opening angle");
  eigen->add_option("--theta0", spec.theta0, "Cap half-angle");
  eigen->add_option("--k", spec.k, "Number of half-space factors");
  eigen->add_option("--alpha", eigen_alpha, "Damping decay exponent for the critical exponent");

  // bound
  auto* bound = app.add_subcommand("bound", "Closed-form lifespan bounds");
  BoundInputs b;
  bool with_oracle = false;
  std::optional<double> theorem_eps;
  RegimeInputs regime;
  bound->add_option("--delta", b.delta)->required();
  bound->add_option("--C0", b.C0)->required();
  bound->add_option("--R1", b.R1);
  bound->add_option("--theta", b.theta);
  bound->add_option("--p", b.p)->required();
  bound->add_flag("--oracle", with_oracle, "Also run the ODE saturation oracle");
  bound->add_option("--epsilon", theorem_eps, "Evaluate the theorem row at this epsilon");
  bound->add_option("--N", regime.N);
  bound->add_option("--gamma", regime.gamma);
  bound->add_option("--alpha", regime.alpha);
  bound->add_option("--C", regime.C);
  bound->add_flag("--singular", regime.singular);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Single run to blowup");
  int trace_points = 60;
  simulate->add_option("--trace-points", trace_points, "Radii in the emitted functional trace")
      ->check(CLI::Range(3, 10000));

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Epsilon sweep with scaling-law fits");

  // verify
  auto* verify = app.add_subcommand("verify", "Property suites");
  verify->require_subcommand(1);
  auto* v_cutoff = verify->add_subcommand("cutoff", "Cutoff-family properties");
  auto* v_hardy = verify->add_subcommand("hardy", "Randomized Hardy inequality");
  int hardy_fields = 1000;
  v_hardy->add_option("--fields", hardy_fields)->check(CLI::PositiveNumber);
  auto* v_harmonic = verify->add_subcommand("harmonic", "Harmonicity of the weight");
  auto* v_lemma = verify->add_subcommand("lemma-oracle", "Closed form vs ODE oracle");
  int lemma_points = 100;
  v_lemma->add_option("--points", lemma_points)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (seed_opt->count()) g.seed = seed_value;

  try {
    if (eigen->parsed()) {
      if (kind_name.empty()) {
        if (g.config.empty()) throw std::invalid_argument("eigen needs --kind or --config");
        spec = load(g).problem.domain;
      } else {
        spec.kind = cross_section_kind_from_string(kind_name);
      }
      const ConeDomain d = make_domain(spec);
      json out{{"kind", std::string(to_string(spec.kind))},
               {"N", spec.N},
               {"lambda_sigma", d.lambda_sigma()},
               {"gamma", d.gamma()},
               {"hardy_constant", hardy_constant(d)},
               {"fujita_threshold", fujita_threshold(spec.N, d.gamma(), eigen_alpha)}};
      std::cout << out.dump(2) << '\n';
      return kOk;
    }

    if (bound->parsed()) {
      b.validate();
      BoundInputs zero = b;
      zero.theta = 0.0;
      json out{{"inputs", {{"delta", b.delta}, {"C0", b.C0}, {"R1", b.R1}, {"theta", b.theta}, {"p", b.p}}},
               {"theta_zero_branch", nullable(key_lemma_bound(zero))},
               {"theta_zero_branch_log", key_lemma_log_bound(zero)}};
      if (b.theta > 0.0) {
        out["theta_positive_branch"] = nullable(key_lemma_bound(b));
        out["theta_positive_branch_log"] = key_lemma_log_bound(b);
      } else {
        out["theta_positive_branch"] = nullptr;
      }
      if (with_oracle) out["oracle"] = ode_saturation_oracle(b);
      if (theorem_eps) {
        regime.p = b.p;
        regime.epsilon = *theorem_eps;
        const TheoremBound tb = theorem_bound(regime);
        out["theorem"] = {{"form", std::string(to_string(tb.form))}, {"exponent", tb.exponent},
                          {"value", nullable(tb.value)}};
      }
      std::cout << out.dump(2) << '\n';
      return kOk;
    }

    if (simulate->parsed()) {
      RunConfig c = load(g);
      const RunResult res = run_until_blowup(c.problem, c.controls);
      write_file(out_path(c, "_record.csv"), records_csv({res.record}));
      json out{{"status", std::string(to_string(res.record.status))},
               {"T_extrapolated", nullable(res.record.T_extrapolated)},
               {"t_final", res.record.t_final},
               {"steps", res.record.steps},
               {"boundary_max", res.record.boundary_max},
               {"record", out_path(c, "_record.csv").string()}};
      if (res.record.status == RunStatus::Blowup && !res.snapshots.empty()) {
        try {
          const PipelineResult pl = criterion_pipeline(c.problem, res, trace_points);
          write_file(out_path(c, "_trace.csv"), trace_csv(pl.trace));
          out["trace"] = out_path(c, "_trace.csv").string();
          out["criterion"] = {{"delta", pl.inputs.delta}, {"R1", pl.inputs.R1},   {"theta", pl.inputs.theta},
                              {"min_C0", nullable(pl.inputs.C0)}, {"C0_spread", nullable(pl.c0_spread)},
                              {"bound", nullable(pl.bound)}, {"bound_holds", pl.bound >= pl.T}};
        } catch (const TraceError& e) {
          out["criterion"] = std::string("skipped: ") + e.what();
        } catch (const std::invalid_argument& e) {
          out["criterion"] = std::string("skipped: ") + e.what();
        }
      }
      std::cout << out.dump(2) << '\n';
      return kOk;
    }

    if (sweep_cmd->parsed()) {
      RunConfig c = load(g);
      SweepOptions opt;
      opt.jobs = g.jobs;
      opt.auto_extent = c.sweep.auto_extent;
      opt.max_extent_doublings = c.sweep.max_extent_doublings;
      SweepResult sr = sweep(c.problem_id, c.problem, c.controls, c.sweep.epsilons, opt);
      if (sr.verdict.empty()) {
        try {
          RegimeInputs in = regime_of(c.problem);
          sr.verdict = regime_verdict(sr, theorem_bound(in), {c.sweep.slope_tolerance, 0.95});
        } catch (const std::invalid_argument& e) {
          sr.verdict = std::string("no theorem row: ") + e.what();
        }
      }
      write_file(out_path(c, "_sweep.csv"), records_csv(sr.rows));
      write_file(out_path(c, "_summary.json"), sweep_summary(sr).dump(2) + "\n");
      write_file(out_path(c, "_loglog.dat"), loglog_dat(sr));
      std::cout << sweep_summary(sr).dump(2) << '\n';
      return kOk;
    }

    if (verify->parsed()) {
      const std::uint64_t seed = g.seed.value_or(7);
      if (v_cutoff->parsed()) return report(run_cutoff_suite());
      if (v_harmonic->parsed()) return report(run_harmonic_suite(seed));
      if (v_lemma->parsed()) return report(run_lemma_oracle_suite(lemma_points, seed));
      if (v_hardy->parsed()) {
        std::vector<CheckResult> results;
        const std::vector<std::pair<std::string, CrossSectionSpec>> domains = {
            {"full-sphere N=3", {CrossSectionKind::FullSphere, 3, 0.0, 0.0, 0}},
            {"quarter-plane", {CrossSectionKind::PlanarSector, 2, std::acos(0.0), 0.0, 0}},
            {"half-line", {CrossSectionKind::HalfLine, 1, 0.0, 0.0, 0}},
        };
        for (const auto& [name, s] : domains) {
          const HardySuiteReport r = run_hardy_suite(make_domain(s), hardy_fields, seed);
          results.push_back({"hardy " + name, r.violations == 0,
                             std::to_string(r.violations) + " violations in " + std::to_string(r.fields) +
                                 " fields, min ratio " + std::to_string(r.min_ratio) + " vs constant " +
                                 std::to_string(r.constant)});
        }
        return report(results);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFault;
  }
  return kOk;
}
