#include "blowup/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blowup {

namespace {

constexpr double kPi = std::numbers::pi;

// |S^{N-1}|
double sphere_area(int N) {
  return 2.0 * std::pow(kPi, N / 2.0) / std::tgamma(N / 2.0);
}

}  // namespace

std::string_view to_string(GeometryKind g) {
  switch (g) {
    case GeometryKind::Line: return "line";
    case GeometryKind::HalfLine: return "half-line";
    case GeometryKind::Radial: return "radial";
    case GeometryKind::PolarSector: return "polar-sector";
  }
  return "unknown";
}

GeometryKind geometry_kind_from_string(std::string_view name) {
  for (auto g : {GeometryKind::Line, GeometryKind::HalfLine, GeometryKind::Radial,
                 GeometryKind::PolarSector})
    if (to_string(g) == name) return g;
  throw std::invalid_argument("unknown grid geometry '" + std::string(name) + "'");
}

int GridSpec::intervals() const {
  const double span = geometry == GeometryKind::Line ? 2.0 * extent : extent;
  return static_cast<int>(std::lround(span / h));
}

int GridSpec::space_dimension() const {
  switch (geometry) {
    case GeometryKind::Line:
    case GeometryKind::HalfLine: return 1;
    case GeometryKind::Radial: return dimension;
    case GeometryKind::PolarSector: return 2;
  }
  return 1;
}

void GridSpec::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
  if (intervals() < 4) throw std::invalid_argument("grid has fewer than 4 intervals");
  const double span = geometry == GeometryKind::Line ? 2.0 * extent : extent;
  if (std::abs(intervals() * h - span) > 1e-9 * span)
    throw std::invalid_argument("grid extent must be a multiple of h");
  if (geometry == GeometryKind::Radial && dimension < 1)
    throw std::invalid_argument("radial grid dimension must be >= 1");
  if (geometry == GeometryKind::PolarSector) {
    if (!(omega > 0.0) || omega > 2.0 * kPi) throw std::invalid_argument("sector angle must lie in (0, 2*pi]");
    if (n_theta < 2) throw std::invalid_argument("polar-sector grid needs n_theta >= 2");
  }
}

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const int n = spec_.intervals();
  const double h = spec_.h;
  std::vector<Eigen::Triplet<double>> entries;

  auto mark_boundary = [&](Eigen::Index i) {
    boundary_.push_back(i);
    is_boundary_[static_cast<std::size_t>(i)] = true;
  };

  switch (spec_.geometry) {
    case GeometryKind::Line:
    case GeometryKind::HalfLine: {
      const Eigen::Index size = n + 1;
      const double origin = spec_.geometry == GeometryKind::Line ? -spec_.extent : 0.0;
      radius_.resize(size);
      angle_ = Eigen::VectorXd::Zero(size);
      weights_ = Eigen::VectorXd::Constant(size, h);
      is_boundary_.assign(static_cast<std::size_t>(size), false);
      Eigen::VectorXd x(size);
      for (Eigen::Index i = 0; i < size; ++i) {
        x(i) = origin + static_cast<double>(i) * h;
        radius_(i) = std::abs(x(i));
        angle_(i) = x(i) < 0.0 ? kPi : 0.0;
      }
      mark_boundary(0);
      mark_boundary(n);
      outer_ring_ = spec_.geometry == GeometryKind::Line ? std::vector<Eigen::Index>{1, n - 1}
                                                          : std::vector<Eigen::Index>{n - 1};
      const double c = 1.0 / (h * h);
      for (Eigen::Index i = 1; i < n; ++i) {
        entries.emplace_back(i, i - 1, c);
        entries.emplace_back(i, i, -2.0 * c);
        entries.emplace_back(i, i + 1, c);
      }
      break;
    }
    case GeometryKind::Radial: {
      const int N = spec_.dimension;
      const Eigen::Index size = n + 1;
      const double area = sphere_area(N);
      radius_.resize(size);
      angle_ = Eigen::VectorXd::Zero(size);
      weights_.resize(size);
      is_boundary_.assign(static_cast<std::size_t>(size), false);
      for (Eigen::Index i = 0; i < size; ++i) {
        radius_(i) = static_cast<double>(i) * h;
        weights_(i) = area * std::pow(radius_(i), N - 1) * h;
      }
      weights_(0) = area * std::pow(h / 2.0, N) / N;
      mark_boundary(n);
      outer_ring_ = {n - 1};
      // Finite-volume form: w_i Δu_i = Σ flux differences, with zero flux at r = 0.
      const double c0 = 2.0 * N / (h * h);
      entries.emplace_back(0, 0, -c0);
      entries.emplace_back(0, 1, c0);
      for (Eigen::Index i = 1; i < n; ++i) {
        const double r = radius_(i);
        const double lo = std::pow((r - h / 2.0) / r, N - 1) / (h * h);
        const double hi = std::pow((r + h / 2.0) / r, N - 1) / (h * h);
        entries.emplace_back(i, i - 1, lo);
        entries.emplace_back(i, i, -(lo + hi));
        entries.emplace_back(i, i + 1, hi);
      }
      break;
    }
    case GeometryKind::PolarSector: {
      // Nodes r_i = i h (i = 1..n), θ_j = j ω/n_θ (j = 0..n_θ); the corner r = 0
      // is a Dirichlet point and is not stored.
      const int nt = spec_.n_theta;
      const double dth = spec_.omega / nt;
      const Eigen::Index size = static_cast<Eigen::Index>(n) * (nt + 1);
      radius_.resize(size);
      angle_.resize(size);
      weights_.resize(size);
      is_boundary_.assign(static_cast<std::size_t>(size), false);
      auto index = [nt](int i, int j) { return static_cast<Eigen::Index>(i - 1) * (nt + 1) + j; };
      for (int i = 1; i <= n; ++i)
        for (int j = 0; j <= nt; ++j) {
          const Eigen::Index k = index(i, j);
          radius_(k) = i * h;
          angle_(k) = j * dth;
          weights_(k) = i * h * h * dth;
          if (i == n || j == 0 || j == nt) mark_boundary(k);
          else if (i == n - 1) outer_ring_.push_back(k);
        }
      for (int i = 1; i < n; ++i) {
        const double r = i * h;
        const double lo = (r - h / 2.0) / (r * h * h);
        const double hi = (r + h / 2.0) / (r * h * h);
        const double ang = 1.0 / (r * r * dth * dth);
        for (int j = 1; j < nt; ++j) {
          const Eigen::Index k = index(i, j);
          if (i > 1) entries.emplace_back(k, index(i - 1, j), lo);
          entries.emplace_back(k, index(i + 1, j), hi);
          entries.emplace_back(k, index(i, j - 1), ang);
          entries.emplace_back(k, index(i, j + 1), ang);
          entries.emplace_back(k, k, -(lo + hi + 2.0 * ang));
        }
      }
      break;
    }
  }

  laplacian_.resize(size(), size());
  laplacian_.setFromTriplets(entries.begin(), entries.end());
  laplacian_.makeCompressed();
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(size());
  for (Eigen::Index k = 0; k < laplacian_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(laplacian_, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  spectral_bound_ = row_sums.maxCoeff();
}

Point Grid::point(Eigen::Index i) const {
  const int N = spec_.space_dimension();
  Point x = Point::Zero(N);
  switch (spec_.geometry) {
    case GeometryKind::Line:
      x(0) = angle_(i) > 0.0 ? -radius_(i) : radius_(i);
      break;
    case GeometryKind::HalfLine:
    case GeometryKind::Radial:
      x(0) = radius_(i);
      break;
    case GeometryKind::PolarSector:
      x(0) = radius_(i) * std::cos(angle_(i));
      x(1) = radius_(i) * std::sin(angle_(i));
      break;
  }
  return x;
}

}  // namespace blowup
