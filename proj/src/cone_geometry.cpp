#include "blowup/cone_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace blowup {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Angle of (x0, x1) in [0, 2π).
double planar_angle(double x0, double x1) {
  double a = std::atan2(x1, x0);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

// Distance from a point at radius r, angular offset `gap` from a boundary ray
// (or cone surface), to that ray.
double ray_distance(double r, double gap) {
  return gap >= kPi / 2.0 ? r : r * std::sin(gap);
}

double polar_from_axis(const Point& x) {
  double r = x.norm();
  if (r == 0.0) return 0.0;
  return std::acos(std::clamp(x(2) / r, -1.0, 1.0));
}

// Compactly supported C^∞ bump on the unit ball, b(0) = e^{-1}.
double bump(double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0; }
double bump_dq(double q) {
  if (q >= 1.0) return 0.0;
  double one_minus = 1.0 - q;
  return -bump(q) / (one_minus * one_minus);
}

struct ShootState {
  double u;
  double du;
};

ShootState legendre_rhs(double theta, const ShootState& s, double lambda) {
  return {s.du, -s.du * std::cos(theta) / std::sin(theta) - lambda * s.u};
}

ShootState rk4_step(double theta, const ShootState& s, double h, double lambda) {
  auto add = [](const ShootState& a, const ShootState& b, double c) {
    return ShootState{a.u + c * b.u, a.du + c * b.du};
  };
  ShootState k1 = legendre_rhs(theta, s, lambda);
  ShootState k2 = legendre_rhs(theta + h / 2, add(s, k1, h / 2), lambda);
  ShootState k3 = legendre_rhs(theta + h / 2, add(s, k2, h / 2), lambda);
  ShootState k4 = legendre_rhs(theta + h, add(s, k3, h), lambda);
  return {s.u + h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
          s.du + h / 6 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du)};
}

// True when the regular solution of (sin θ u')' + λ sin θ u = 0 vanishes
// somewhere in (0, theta0]. Monotone in λ by Sturm comparison.
bool shoot_has_zero(double lambda, double theta0) {
  constexpr double kStart = 1e-4;
  constexpr double kTol = 1e-12;
  double theta = kStart;
  ShootState s{1.0 - lambda * kStart * kStart / 4.0, -lambda * kStart / 2.0};
  double h = 1e-3;
  while (theta < theta0) {
    h = std::min(h, theta0 - theta);
    ShootState full = rk4_step(theta, s, h, lambda);
    ShootState half = rk4_step(theta, s, h / 2, lambda);
    half = rk4_step(theta + h / 2, half, h / 2, lambda);
    double err = std::max(std::abs(full.u - half.u), std::abs(full.du - half.du)) / 15.0;
    double scale = std::max(1.0, std::abs(half.u) + std::abs(half.du) * h);
    if (err > kTol * scale && h > 1e-12) {
      h *= 0.5;
      continue;
    }
    theta += h;
    s = half;
    if (s.u <= 0.0) return true;
    if (err < kTol * scale / 64.0) h *= 2.0;
  }
  return false;
}

}  // namespace

std::string_view to_string(CrossSectionKind kind) {
  switch (kind) {
    case CrossSectionKind::FullSphere: return "full-sphere";
    case CrossSectionKind::HalfLine: return "half-line";
    case CrossSectionKind::FullLine: return "full-line";
    case CrossSectionKind::PlanarSector: return "planar-sector";
    case CrossSectionKind::SphericalCap: return "spherical-cap";
    case CrossSectionKind::HalfSpaceProduct: return "half-space-product";
  }
  return "unknown";
}

CrossSectionKind cross_section_kind_from_string(std::string_view name) {
  for (auto kind : {CrossSectionKind::FullSphere, CrossSectionKind::HalfLine,
                    CrossSectionKind::FullLine, CrossSectionKind::PlanarSector,
                    CrossSectionKind::SphericalCap, CrossSectionKind::HalfSpaceProduct}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown cross-section kind '" + std::string(name) + "'");
}

void CrossSectionSpec::validate() const {
  if (N < 1) throw std::invalid_argument("dimension N must be >= 1");
  switch (kind) {
    case CrossSectionKind::FullSphere:
      if (N < 2) throw std::invalid_argument("full-sphere requires N >= 2 (use full-line for N = 1)");
      break;
    case CrossSectionKind::HalfLine:
    case CrossSectionKind::FullLine:
      if (N != 1) throw std::invalid_argument(std::string(to_string(kind)) + " requires N = 1");
      break;
    case CrossSectionKind::PlanarSector:
      if (N != 2) throw std::invalid_argument("planar-sector requires N = 2");
      if (!(omega > 0.0) || omega > 2.0 * kPi)
        throw std::invalid_argument("sector angle omega must lie in (0, 2*pi]");
      break;
    case CrossSectionKind::SphericalCap:
      if (N != 3) throw std::invalid_argument("spherical-cap requires N = 3");
      if (!(theta0 > 0.0) || theta0 > kPi)
        throw std::invalid_argument("cap angle theta0 must lie in (0, pi]");
      break;
    case CrossSectionKind::HalfSpaceProduct:
      if (N < 2) throw std::invalid_argument("half-space-product requires N >= 2 (use half-line/full-line for N = 1)");
      if (k < 0 || k > N) throw std::invalid_argument("half-space-product requires 0 <= k <= N");
      break;
  }
}

ConeDomain::ConeDomain(CrossSectionSpec spec, double lambda_sigma, double gamma)
    : spec_(spec), lambda_sigma_(lambda_sigma), gamma_(gamma) {}

double ConeDomain::angular_profile(const Point& direction) const {
  switch (spec_.kind) {
    case CrossSectionKind::FullSphere:
    case CrossSectionKind::FullLine:
      return 1.0;
    case CrossSectionKind::HalfLine:
      return direction(0) > 0.0 ? 1.0 : 0.0;
    case CrossSectionKind::PlanarSector: {
      double a = planar_angle(direction(0), direction(1));
      if (a >= spec_.omega) return 0.0;
      return std::sin(kPi * a / spec_.omega);
    }
    case CrossSectionKind::SphericalCap: {
      double theta = std::acos(std::clamp(direction(2), -1.0, 1.0));
      if (theta >= spec_.theta0) return 0.0;
      if (spec_.theta0 >= kPi) return 1.0;
      return std::max(0.0, legendre_p(gamma_, theta));
    }
    case CrossSectionKind::HalfSpaceProduct: {
      double prod = 1.0;
      for (int i = 0; i < spec_.k; ++i) prod *= std::max(0.0, direction(i));
      return prod;
    }
  }
  return 0.0;
}

bool ConeDomain::contains(const Point& x) const {
  switch (spec_.kind) {
    case CrossSectionKind::FullSphere:
    case CrossSectionKind::FullLine:
      return true;
    case CrossSectionKind::HalfLine:
      return x(0) > 0.0;
    case CrossSectionKind::PlanarSector: {
      if (x(0) == 0.0 && x(1) == 0.0) return false;
      double a = planar_angle(x(0), x(1));
      return a > 0.0 && a < spec_.omega;
    }
    case CrossSectionKind::SphericalCap:
      if (x.norm() == 0.0) return false;
      return polar_from_axis(x) < spec_.theta0;
    case CrossSectionKind::HalfSpaceProduct:
      for (int i = 0; i < spec_.k; ++i)
        if (!(x(i) > 0.0)) return false;
      return true;
  }
  return false;
}

bool ConeDomain::contains_closure(const Point& x, double tol) const {
  double slack = tol * std::max(1.0, x.norm());
  switch (spec_.kind) {
    case CrossSectionKind::FullSphere:
    case CrossSectionKind::FullLine:
      return true;
    case CrossSectionKind::HalfLine:
      return x(0) >= -slack;
    case CrossSectionKind::PlanarSector: {
      double r = x.norm();
      if (r <= slack) return true;
      double a = planar_angle(x(0), x(1));
      return a <= spec_.omega + tol || a >= 2.0 * kPi - tol;
    }
    case CrossSectionKind::SphericalCap: {
      if (x.norm() <= slack) return true;
      return polar_from_axis(x) <= spec_.theta0 + tol;
    }
    case CrossSectionKind::HalfSpaceProduct:
      for (int i = 0; i < spec_.k; ++i)
        if (x(i) < -slack) return false;
      return true;
  }
  return false;
}

double ConeDomain::boundary_distance(const Point& x) const {
  switch (spec_.kind) {
    case CrossSectionKind::FullSphere:
    case CrossSectionKind::FullLine:
      return kInf;
    case CrossSectionKind::HalfLine:
      return std::max(0.0, x(0));
    case CrossSectionKind::PlanarSector: {
      if (!contains(x)) return 0.0;
      double r = x.norm();
      double a = planar_angle(x(0), x(1));
      return std::min(ray_distance(r, a), ray_distance(r, spec_.omega - a));
    }
    case CrossSectionKind::SphericalCap: {
      if (!contains(x)) return 0.0;
      if (spec_.theta0 >= kPi) return kInf;
      return ray_distance(x.norm(), spec_.theta0 - polar_from_axis(x));
    }
    case CrossSectionKind::HalfSpaceProduct: {
      double d = kInf;
      for (int i = 0; i < spec_.k; ++i) d = std::min(d, std::max(0.0, x(i)));
      return d;
    }
  }
  return 0.0;
}

double gamma_root(int N, double lambda_sigma) {
  if (N < 1) throw std::invalid_argument("gamma_root: N must be >= 1");
  if (lambda_sigma < 0.0) throw std::invalid_argument("gamma_root: lambda_sigma must be >= 0");
  double b = static_cast<double>(N - 2);
  double disc = std::sqrt(b * b + 4.0 * lambda_sigma);
  // Cancellation-free form of (−b + disc)/2 when b > 0.
  if (b > 0.0) return 2.0 * lambda_sigma / (b + disc);
  return (-b + disc) / 2.0;
}

double sector_eigenvalue(double omega) {
  if (!(omega > 0.0) || omega > 2.0 * kPi)
    throw std::invalid_argument("sector_eigenvalue: omega must lie in (0, 2*pi]");
  double q = kPi / omega;
  return q * q;
}

double cap_eigenvalue(double theta0) {
  if (!(theta0 > 0.0) || theta0 > kPi)
    throw std::invalid_argument("cap_eigenvalue: theta0 must lie in (0, pi]");
  if (theta0 == kPi) return 0.0;

  constexpr double kBesselJ0 = 2.404825557695773;
  double lo = 0.0;
  double hi = (kBesselJ0 / theta0) * (kBesselJ0 / theta0) + 2.0;
  for (int i = 0; !shoot_has_zero(hi, theta0); ++i) {
    if (i > 60) throw std::runtime_error("cap_eigenvalue: failed to bracket eigenvalue");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (shoot_has_zero(mid, theta0)) hi = mid;
    else lo = mid;
  }
  if (hi - lo > 1e-12 * hi) throw std::runtime_error("cap_eigenvalue: bisection did not converge");
  return 0.5 * (lo + hi);
}

double legendre_p(double nu, double theta) {
  if (theta < 0.0 || theta >= kPi) throw std::invalid_argument("legendre_p: theta must lie in [0, pi)");
  double z = std::sin(theta / 2.0);
  z *= z;
  double term = 1.0;
  double sum = 1.0;
  for (long n = 0; n < 10'000'000; ++n) {
    double dn = static_cast<double>(n);
    term *= (dn - nu) * (dn + nu + 1.0) / ((dn + 1.0) * (dn + 1.0)) * z;
    sum += term;
    if (dn > nu + 1.0 && std::abs(term) <= 1e-17 * std::max(1.0, std::abs(sum))) return sum;
    if (term == 0.0) return sum;
  }
  throw std::runtime_error("legendre_p: series did not converge");
}

ConeDomain make_domain(const CrossSectionSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CrossSectionKind::FullSphere:
      return ConeDomain(spec, 0.0, 0.0);
    case CrossSectionKind::FullLine:
      return ConeDomain(spec, 0.0, 0.0);
    case CrossSectionKind::HalfLine:
      return ConeDomain(spec, 0.0, gamma_root(1, 0.0));
    case CrossSectionKind::PlanarSector: {
      double lambda = sector_eigenvalue(spec.omega);
      return ConeDomain(spec, lambda, gamma_root(2, lambda));
    }
    case CrossSectionKind::SphericalCap: {
      double lambda = cap_eigenvalue(spec.theta0);
      return ConeDomain(spec, lambda, gamma_root(3, lambda));
    }
    case CrossSectionKind::HalfSpaceProduct: {
      double lambda = static_cast<double>(spec.k * (spec.N - 2 + spec.k));
      return ConeDomain(spec, lambda, gamma_root(spec.N, lambda));
    }
  }
  throw std::invalid_argument("make_domain: unsupported kind");
}

double WeightPhi::operator()(const Point& x) const { return phi_eval(*this, x); }

double phi_eval(const WeightPhi& w, const Point& x) {
  const ConeDomain& d = w.domain;
  if (x.size() != d.dimension())
    throw std::invalid_argument("phi_eval: point dimension does not match the domain");
  if (!d.contains_closure(x)) throw std::invalid_argument("phi_eval: point lies outside the cone");
  if (!d.contains(x)) {
    // Boundary of the cone; with no boundary the weight is constant.
    return d.boundary_distance(x) == kInf ? 1.0 : 0.0;
  }
  double r = x.norm();
  if (r == 0.0) return d.gamma() > 0.0 ? 0.0 : 1.0;
  if (d.spec().kind == CrossSectionKind::FullLine) return 1.0;
  return std::pow(r, d.gamma()) * d.angular_profile(x / r);
}

HarmonicResidual harmonic_residual(const WeightPhi& w, const Point& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("harmonic_residual: h must be positive");
  const ConeDomain& d = w.domain;
  if (!d.contains(x) || d.boundary_distance(x) <= h || (d.gamma() > 0.0 && x.norm() <= h))
    throw std::invalid_argument("harmonic_residual: stencil leaves the cone");
  const Eigen::Index n = x.size();
  double center = phi_eval(w, x);
  double lap = 0.0;
  double radial = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Point plus = x, minus = x;
    plus(i) += h;
    minus(i) -= h;
    double fp = phi_eval(w, plus);
    double fm = phi_eval(w, minus);
    lap += (fp - 2.0 * center + fm) / (h * h);
    radial += x(i) * (fp - fm) / (2.0 * h);
  }
  return {std::abs(lap), std::abs(radial - d.gamma() * center)};
}

double hardy_constant(const ConeDomain& d) {
  double c = 0.5 * (d.dimension() - 2) + d.gamma();
  return c * c;
}

double hardy_ratio(const ConeDomain& d, const TestField& u, const HardyQuadrature& q) {
  const int N = d.dimension();
  if (N > 3) throw std::invalid_argument("hardy_ratio: quadrature implemented for N <= 3");
  if (!(u.r_min > 0.0) || !(u.r_max > u.r_min))
    throw std::invalid_argument("hardy_ratio: test field must be supported in a shell away from 0");

  const double s0 = std::log(u.r_min);
  const double ds = (std::log(u.r_max) - s0) / q.radial;
  double energy = 0.0;
  double weighted = 0.0;
  auto accumulate = [&](const Point& x, double measure) {
    if (!d.contains(x)) return;
    double v = u.value(x);
    Point g = u.gradient(x);
    energy += g.squaredNorm() * measure;
    weighted += v * v / x.squaredNorm() * measure;
  };

  for (int ir = 0; ir < q.radial; ++ir) {
    const double r = std::exp(s0 + (ir + 0.5) * ds);
    if (N == 1) {
      Point x(1);
      for (double sign : {1.0, -1.0}) {
        x(0) = sign * r;
        accumulate(x, r * ds);
      }
    } else if (N == 2) {
      double lo = 0.0, hi = 2.0 * kPi;
      const auto& spec = d.spec();
      if (spec.kind == CrossSectionKind::PlanarSector) hi = spec.omega;
      if (spec.kind == CrossSectionKind::HalfSpaceProduct && spec.k == 1) hi = kPi;
      if (spec.kind == CrossSectionKind::HalfSpaceProduct && spec.k == 2) hi = kPi / 2.0;
      const double dth = (hi - lo) / q.polar;
      Point x(2);
      for (int ia = 0; ia < q.polar; ++ia) {
        double a = lo + (ia + 0.5) * dth;
        x << r * std::cos(a), r * std::sin(a);
        accumulate(x, r * r * ds * dth);
      }
    } else {
      double theta_max = d.spec().kind == CrossSectionKind::SphericalCap ? d.spec().theta0 : kPi;
      const double dth = theta_max / q.polar;
      const double dph = 2.0 * kPi / q.azimuthal;
      Point x(3);
      for (int it = 0; it < q.polar; ++it) {
        double th = (it + 0.5) * dth;
        double st = std::sin(th), ct = std::cos(th);
        for (int ip = 0; ip < q.azimuthal; ++ip) {
          double ph = (ip + 0.5) * dph;
          x << r * st * std::cos(ph), r * st * std::sin(ph), r * ct;
          accumulate(x, r * r * r * st * ds * dth * dph);
        }
      }
    }
  }
  if (weighted <= 0.0) throw std::invalid_argument("hardy_ratio: test field is identically zero");
  return energy / weighted;
}

TestField random_bump_field(const ConeDomain& d, std::uint64_t seed) {
  const int N = d.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> count_dist(1, 3);

  struct Bump {
    Point center;
    double radius;
    double amplitude;
  };
  std::vector<Bump> bumps;
  double r_min = kInf, r_max = 0.0;
  const int count = count_dist(rng);
  for (int b = 0; b < count; ++b) {
    Point dir(N);
    bool found = false;
    for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
      for (int i = 0; i < N; ++i) dir(i) = normal(rng);
      double n = dir.norm();
      if (n == 0.0) continue;
      dir /= n;
      found = d.contains(dir) && d.boundary_distance(dir) >= 0.05;
    }
    if (!found) throw std::runtime_error("random_bump_field: could not sample a direction inside the cone");
    Point c = dir * (1.0 + 2.0 * unit(rng));
    double room = std::min(d.boundary_distance(c), c.norm());
    double radius = (0.3 + 0.6 * unit(rng)) * room;
    double amplitude = (0.2 + 0.8 * unit(rng)) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    r_min = std::min(r_min, c.norm() - radius);
    r_max = std::max(r_max, c.norm() + radius);
    bumps.push_back({c, radius, amplitude});
  }

  TestField f;
  f.r_min = r_min;
  f.r_max = r_max;
  f.value = [bumps](const Point& x) {
    double v = 0.0;
    for (const auto& b : bumps) v += b.amplitude * bump((x - b.center).squaredNorm() / (b.radius * b.radius));
    return v;
  };
  f.gradient = [bumps](const Point& x) {
    Point g = Point::Zero(x.size());
    for (const auto& b : bumps) {
      double r2 = b.radius * b.radius;
      Point y = x - b.center;
      g += b.amplitude * bump_dq(y.squaredNorm() / r2) * (2.0 / r2) * y;
    }
    return g;
  };
  return f;
}

TestField near_hardy_optimizer(const ConeDomain& d, double log_half_width) {
  const int N = d.dimension();
  const double L = log_half_width;
  const double a = -0.5 * (N - 2);
  TestField f;
  f.r_min = std::exp(-L);
  f.r_max = std::exp(L);
  auto value = [d, a, L](const Point& x) {
    double r = x.norm();
    if (r == 0.0 || !d.contains(x)) return 0.0;
    double s = std::log(r) / L;
    return std::pow(r, a) * d.angular_profile(x / r) * bump(s * s);
  };
  f.value = value;
  f.gradient = [value](const Point& x) {
    Point g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double h = 1e-6 * std::max(x.norm(), 1e-300);
      Point p = x, m = x;
      p(i) += h;
      m(i) -= h;
      g(i) = (value(p) - value(m)) / (2.0 * h);
    }
    return g;
  };
  return f;
}

HardySuiteReport run_hardy_suite(const ConeDomain& d, int fields, std::uint64_t seed, double tol) {
  HardySuiteReport report;
  report.constant = hardy_constant(d);
  report.min_ratio = kInf;
  HardyQuadrature q;
  if (d.dimension() == 3) q = {32, 24, 48};
  for (int i = 0; i < fields; ++i) {
    TestField u = random_bump_field(d, seed + static_cast<std::uint64_t>(i));
    double ratio = hardy_ratio(d, u, q);
    report.min_ratio = std::min(report.min_ratio, ratio);
    if (ratio < report.constant - tol) ++report.violations;
    ++report.fields;
  }
  return report;
}

std::vector<CheckResult> run_harmonic_suite(std::uint64_t seed, int points) {
  std::vector<CrossSectionSpec> specs = {
      {CrossSectionKind::FullSphere, 3, 0.0, 0.0, 0},
      {CrossSectionKind::HalfLine, 1, 0.0, 0.0, 0},
      {CrossSectionKind::PlanarSector, 2, kPi / 2, 0.0, 0},
      {CrossSectionKind::PlanarSector, 2, 3 * kPi / 2, 0.0, 0},
      {CrossSectionKind::SphericalCap, 3, 0.0, kPi / 3, 0},
      {CrossSectionKind::SphericalCap, 3, 0.0, kPi / 2, 0},
      {CrossSectionKind::HalfSpaceProduct, 3, 0.0, 0.0, 2},
  };
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  constexpr double h = 1e-3;
  constexpr double tol = 1e-4;
  for (const auto& spec : specs) {
    const ConeDomain d = make_domain(spec);
    const WeightPhi w{d};
    double worst_lap = 0.0, worst_euler = 0.0;
    int tested = 0;
    while (tested < points) {
      Point x(spec.N);
      for (int k = 0; k < spec.N; ++k) x(k) = normal(rng);
      x *= radius(rng) / x.norm();
      if (!d.contains(x) || d.boundary_distance(x) < 0.05 * x.norm()) continue;
      const HarmonicResidual res = harmonic_residual(w, x, h);
      const double scale = std::abs(phi_eval(w, x)) + 1e-3 * std::pow(x.norm(), d.gamma());
      worst_lap = std::max(worst_lap, res.laplacian * x.squaredNorm() / scale);
      worst_euler = std::max(worst_euler, res.euler / scale);
      ++tested;
    }
    std::string name = std::string(to_string(spec.kind)) + " N=" + std::to_string(spec.N);
    if (spec.kind == CrossSectionKind::PlanarSector) name += " omega=" + std::to_string(spec.omega);
    if (spec.kind == CrossSectionKind::SphericalCap) name += " theta0=" + std::to_string(spec.theta0);
    if (spec.kind == CrossSectionKind::HalfSpaceProduct) name += " k=" + std::to_string(spec.k);
    std::ostringstream os;
    os.precision(3);
    os << "max relative |lap| " << worst_lap << ", max relative euler " << worst_euler;
    out.push_back({"harmonic " + name, worst_lap <= tol && worst_euler <= tol, os.str()});
  }
  return out;
}

double fujita_threshold(int N, double gamma, double alpha) {
  if (N < 1) throw std::invalid_argument("fujita_threshold: N must be >= 1");
  if (gamma < 0.0) throw std::invalid_argument("fujita_threshold: gamma must be >= 0");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("fujita_threshold: alpha must lie in [0,1]");
  double denom = N + gamma - alpha;
  if (!(denom > 0.0)) throw std::invalid_argument("fujita_threshold: N + gamma - alpha must be positive");
  return 1.0 + 2.0 / denom;
}

}  // namespace blowup
