#include "blowup/lifespan_bounds.hpp"

#include "blowup/cone_geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace blowup {

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct SaturationState {
  double Z;
  double log_R;
};

// Returns log R at saturation of Z.
double march_saturation(const BoundInputs& b, double step) {
  const double a = kLn2 * b.delta;
  const double K = std::pow(kLn2 * b.C0, b.p);  // Z' = (a+Z)^p / K
  const double q = (b.p - 1.0) * b.theta;
  auto rhs = [&](const SaturationState& s) {
    return SaturationState{std::pow(a + s.Z, b.p) / K, std::exp(-q * s.log_R)};
  };
  auto axpy = [](const SaturationState& s, const SaturationState& k, double h) {
    return SaturationState{s.Z + h * k.Z, s.log_R + h * k.log_R};
  };

  SaturationState s{0.0, std::log(b.R1)};
  // Stop once (a+Z)^{1-p} has fallen by ten orders of magnitude.
  const double stop = a * std::pow(1e10, 1.0 / (b.p - 1.0));
  for (long it = 0; a + s.Z < stop; ++it) {
    if (it > 50'000'000) throw OracleResolutionError("saturation oracle exceeded its step budget");
    const double h = step * K * std::pow(a + s.Z, 1.0 - b.p);
    SaturationState k1 = rhs(s);
    SaturationState k2 = rhs(axpy(s, k1, h / 2));
    SaturationState k3 = rhs(axpy(s, k2, h / 2));
    SaturationState k4 = rhs(axpy(s, k3, h));
    s.Z += h / 6 * (k1.Z + 2 * k2.Z + 2 * k3.Z + k4.Z);
    s.log_R += h / 6 * (k1.log_R + 2 * k2.log_R + 2 * k3.log_R + k4.log_R);
  }
  return s.log_R;
}

}  // namespace

void BoundInputs::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(C0 > 0.0)) throw std::invalid_argument("C0 must be positive");
  if (!(R1 > 0.0)) throw std::invalid_argument("R1 must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be nonnegative");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
}

double key_lemma_log_bound(const BoundInputs& b) {
  b.validate();
  const double gain = kLn2 * std::pow(b.C0, b.p) * std::pow(b.delta, -(b.p - 1.0));
  if (b.theta > 0.0) {
    const double q = (b.p - 1.0) * b.theta;
    return std::log(std::pow(b.R1, q) + gain * b.theta) / q;
  }
  return std::log(b.R1) + gain / (b.p - 1.0);
}

double key_lemma_bound(const BoundInputs& b) {
  b.validate();
  const double gain = kLn2 * std::pow(b.C0, b.p) * std::pow(b.delta, -(b.p - 1.0));
  if (b.theta > 0.0) {
    const double q = (b.p - 1.0) * b.theta;
    return std::pow(std::pow(b.R1, q) + gain * b.theta, 1.0 / q);
  }
  return std::exp(std::log(b.R1) + gain / (b.p - 1.0));
}

double ode_saturation_oracle(const BoundInputs& b, double step) {
  b.validate();
  if (!(step > 0.0)) throw std::invalid_argument("oracle step must be positive");
  const double coarse = march_saturation(b, step);
  const double fine = march_saturation(b, step / 2.0);
  const double rel = std::abs(std::expm1(fine - coarse));
  if (rel > 1e-6) {
    std::ostringstream os;
    os << "saturation oracle step " << step << " too coarse: refinements differ by " << rel;
    throw OracleResolutionError(os.str());
  }
  return std::exp(fine);
}

void FunctionalTrace::validate() const {
  if (y.size() != radii.size() || m.size() != radii.size())
    throw TraceError("trace columns have different lengths");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw TraceError("trace radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw TraceError("trace radii must be increasing");
    if (y[i] < 0.0 || m[i] < 0.0) throw TraceError("trace masses must be nonnegative");
    const double slack = 1e-12 * std::max(1.0, m[i]);
    if (y[i] > m[i] + slack) throw TraceError("trace violates y <= m");
    // y may dip once ψ*_R vanishes on s < 1/2; only m is monotone.
    if (i > 0 && m[i] < m[i - 1] - slack) throw TraceError("trace mass m must be non-decreasing in R");
  }
}

YTransform y_transform(const FunctionalTrace& tr) {
  tr.validate();
  YTransform out;
  const std::size_t n = tr.size();
  out.Y.assign(n, 0.0);
  if (n == 0) return out;
  if (tr.y.front() != 0.0)
    throw TraceError("y must vanish at the first radius (start the trace at R <= 1)");
  for (std::size_t i = 1; i < n; ++i) {
    const double dlog = std::log(tr.radii[i] / tr.radii[i - 1]);
    out.Y[i] = out.Y[i - 1] + 0.5 * (tr.y[i] + tr.y[i - 1]) * dlog;
  }

  // Richardson estimate from the trace restricted to even indices.
  const double scale = std::max(*std::max_element(out.Y.begin(), out.Y.end()), 1e-300);
  double coarse = 0.0;
  double err = 0.0;
  for (std::size_t i = 2; i < n; i += 2) {
    coarse += 0.5 * (tr.y[i] + tr.y[i - 2]) * std::log(tr.radii[i] / tr.radii[i - 2]);
    err = std::max(err, std::abs(coarse - out.Y[i]) / 3.0);
  }
  out.refinement_error = err / scale;
  if (out.refinement_error > 0.01) {
    std::ostringstream os;
    os << "trace radii too sparse: trapezoid refinement error " << out.refinement_error;
    throw TraceError(os.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double limit = kLn2 * tr.m[i] + 3.0 * err + 1e-12 * scale;
    if (out.Y[i] > limit) {
      std::ostringstream os;
      os << "Y(R) <= (log 2) m(R) violated at R=" << tr.radii[i] << ": Y=" << out.Y[i]
         << ", (log 2) m=" << kLn2 * tr.m[i];
      throw TraceError(os.str());
    }
  }
  return out;
}

CriterionResult criterion_check(const FunctionalTrace& tr, const BoundInputs& b, double T) {
  tr.validate();
  if (tr.size() == 0 || tr.radii.back() < b.R1)
    throw std::invalid_argument("criterion_check: trace ends before R1");
  CriterionResult out;
  const double conj = b.p / (b.p - 1.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double R = tr.radii[i];
    if (R < b.R1 || R >= T) continue;
    const double lhs = b.delta + tr.m[i];
    const double scale = std::pow(R, -b.theta / conj) * std::pow(tr.y[i], 1.0 / b.p);
    double required;
    if (scale > 0.0) required = lhs / scale;
    else required = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.radii.push_back(R);
    out.required_C0.push_back(required);
    out.holds.push_back(lhs <= b.C0 * scale * (1.0 + 1e-12));
    out.min_C0 = std::max(out.min_C0, required);
  }
  if (out.radii.empty()) throw std::invalid_argument("criterion_check: no trace radius in [R1, T)");
  return out;
}

std::string_view to_string(BoundForm f) {
  switch (f) {
    case BoundForm::Exponential: return "exponential";
    case BoundForm::Power: return "power";
    case BoundForm::Borderline: return "borderline";
    case BoundForm::LowPower: return "low-power";
  }
  return "unknown";
}

TheoremBound theorem_bound(const RegimeInputs& in) {
  if (!(in.p > 1.0)) throw std::invalid_argument("theorem_bound: p must exceed 1");
  if (!(in.epsilon > 0.0)) throw std::invalid_argument("theorem_bound: epsilon must be positive");
  constexpr double kSame = 1e-12;
  TheoremBound out;
  auto power_row = [&](double exponent, BoundForm form) {
    out.form = form;
    out.exponent = exponent;
    out.value = in.C * std::pow(in.epsilon, exponent);
    return out;
  };
  auto exponential_row = [&]() {
    out.form = BoundForm::Exponential;
    out.exponent = -(in.p - 1.0);
    out.value = std::exp(in.C * std::pow(in.epsilon, -(in.p - 1.0)));
    return out;
  };

  if (in.singular) {
    if (in.N < 3) throw std::invalid_argument("theorem_bound: singular damping requires N >= 3");
    const double critical = (in.N + 1.0) / (in.N - 1.0);
    const double lower = static_cast<double>(in.N) / (in.N - 1.0);
    if (in.p > critical + kSame) throw std::invalid_argument("theorem_bound: p above the critical exponent");
    if (std::abs(in.p - critical) <= kSame) return exponential_row();
    if (in.p <= lower) throw std::invalid_argument("theorem_bound: no bound stated for p <= N/(N-1)");
    const double gap = 1.0 / (in.p - 1.0) - (in.N - 1.0) / 2.0;
    return power_row(-((2.0 - in.alpha) / 2.0) / gap, BoundForm::Power);
  }

  const double critical = fujita_threshold(in.N, in.gamma, in.alpha);
  const double span = in.N + in.gamma - in.alpha;
  const double lower = 1.0 + in.alpha / span;
  if (in.p > critical + kSame) throw std::invalid_argument("theorem_bound: p above the critical exponent");
  if (std::abs(in.p - critical) <= kSame) return exponential_row();
  if (in.alpha > 0.0 && std::abs(in.p - lower) <= kSame)
    return power_row(-(in.p - 1.0) - in.delta_loss, BoundForm::Borderline);
  if (in.p < lower) return power_row(-(in.p - 1.0), BoundForm::LowPower);
  const double gap = 1.0 / (in.p - 1.0) - span / 2.0;
  return power_row(-((2.0 - in.alpha) / 2.0) / gap, BoundForm::Power);
}

std::vector<CheckResult> run_lemma_oracle_suite(int points, std::uint64_t seed) {
  std::vector<CheckResult> out;
  const auto start = std::chrono::steady_clock::now();

  {
    const double v0 = key_lemma_bound({1.0, 1.0, 1.0, 0.0, 2.0});
    const double v1 = key_lemma_bound({1.0, 1.0, 1.0, 1.0, 2.0});
    const bool ok0 = std::abs(v0 - 2.0) <= 4.0 * std::numeric_limits<double>::epsilon() * 2.0;
    const bool ok1 = std::abs(v1 - (1.0 + kLn2)) <= 4.0 * std::numeric_limits<double>::epsilon() * 2.0;
    std::ostringstream os;
    os.precision(17);
    os << "theta=0 -> " << v0 << ", theta=1 -> " << v1;
    out.push_back({"key lemma spot values", ok0 && ok1, os.str()});
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < points; ++i) {
    BoundInputs b;
    b.delta = std::pow(10.0, -1.0 + 2.0 * unit(rng));
    b.C0 = 0.2 + 0.4 * unit(rng);
    b.R1 = 1.0 + 9.0 * unit(rng);
    b.theta = (i % 10 == 0) ? 0.0 : 2.0 * unit(rng);
    b.p = 1.2 + 2.8 * unit(rng);
    try {
      const double closed = key_lemma_bound(b);
      const double oracle = ode_saturation_oracle(b);
      const double rel = std::abs(oracle - closed) / closed;
      worst = std::max(worst, rel);
      if (!(rel <= 1e-6)) ++failures;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << points << " points, max relative gap " << worst << ", " << elapsed << " s";
  out.push_back({"closed form matches saturation oracle", failures == 0, os.str()});
  out.push_back({"oracle suite runtime < 1 s", elapsed < 1.0, std::to_string(elapsed) + " s"});
  return out;
}

}  // namespace blowup
