#pragma once

#include "blowup/cone_geometry.hpp"

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <string_view>
#include <vector>

namespace blowup {

enum class GeometryKind { Line, HalfLine, Radial, PolarSector };

std::string_view to_string(GeometryKind g);
GeometryKind geometry_kind_from_string(std::string_view name);

/// Truncated computational domain. Homogeneous Dirichlet data at every finite
/// boundary: the truncation radius `extent` and, where present, the cone
/// boundary itself.
struct GridSpec {
  GeometryKind geometry = GeometryKind::Line;
  double extent = 20.0;
  double h = 0.02;
  /// Spatial dimension of radial grids.
  int dimension = 1;
  /// Opening angle of polar-sector grids.
  double omega = 0.0;
  /// Angular intervals of polar-sector grids.
  int n_theta = 32;

  /// Number of intervals along the radial / linear direction.
  int intervals() const;
  /// Spatial dimension N of the underlying cone.
  int space_dimension() const;
  void validate() const;
};

/// Node layout, quadrature weights and the discrete Laplacian of a GridSpec.
///
/// The Laplacian is symmetric with respect to the weighted inner product
/// Σ w_i u_i v̄_i; rows of boundary nodes are empty.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(weights_.size()); }

  /// Cartesian position of node i in R^N.
  Point point(Eigen::Index i) const;
  double radius(Eigen::Index i) const { return radius_(i); }
  const Eigen::VectorXd& radii() const { return radius_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::vector<Eigen::Index>& boundary_nodes() const { return boundary_; }
  /// Nodes one step inside the truncation boundary.
  const std::vector<Eigen::Index>& outer_ring() const { return outer_ring_; }
  bool is_boundary(Eigen::Index i) const { return is_boundary_[static_cast<std::size_t>(i)]; }
  const Eigen::SparseMatrix<double>& laplacian() const { return laplacian_; }
  /// True when the Laplacian is tridiagonal in node order.
  bool banded() const { return spec_.geometry != GeometryKind::PolarSector; }
  /// Gershgorin bound on the spectral radius of the Laplacian.
  double spectral_bound() const { return spectral_bound_; }

 private:
  GridSpec spec_;
  Eigen::VectorXd radius_;
  Eigen::VectorXd angle_;
  Eigen::VectorXd weights_;
  std::vector<Eigen::Index> boundary_;
  std::vector<Eigen::Index> outer_ring_;
  std::vector<bool> is_boundary_;
  Eigen::SparseMatrix<double> laplacian_;
  double spectral_bound_ = 0.0;
};

/// Δ_h u, second-order centered.
template <typename Derived>
auto apply_laplacian(const Grid& grid, const Eigen::MatrixBase<Derived>& u) {
  return (grid.laplacian() * u).eval();
}

/// Σ w_i f(u_i): grid quadrature of a nodal field.
template <typename Derived>
typename Derived::Scalar integrate(const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  return (grid.weights().template cast<typename Derived::Scalar>().array() * f.array()).sum();
}

/// Tridiagonal LU without pivoting; stable for diagonally dominant systems.
template <typename Scalar>
class TridiagonalSolver {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalSolver() = default;
  TridiagonalSolver(const Vector& lower, const Vector& diag, const Vector& upper) {
    factor(lower, diag, upper);
  }

  /// lower(i) couples row i to i−1, upper(i) couples row i to i+1.
  void factor(const Vector& lower, const Vector& diag, const Vector& upper) {
    const Eigen::Index n = diag.size();
    lower_ = lower;
    upper_ = upper;
    inv_pivot_.resize(n);
    inv_pivot_(0) = Scalar(1) / diag(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      lower_(i) = lower(i) * inv_pivot_(i - 1);
      inv_pivot_(i) = Scalar(1) / (diag(i) - lower_(i) * upper(i - 1));
    }
  }

  template <typename Derived>
  Vector solve(const Eigen::MatrixBase<Derived>& rhs) const {
    Vector x = rhs;
    solve_in_place(x);
    return x;
  }

  void solve_in_place(Vector& x) const {
    const Eigen::Index n = inv_pivot_.size();
    Scalar* xs = x.data();
    const Scalar* l = lower_.data();
    const Scalar* u = upper_.data();
    const Scalar* ip = inv_pivot_.data();
    for (Eigen::Index i = 1; i < n; ++i) xs[i] -= l[i] * xs[i - 1];
    xs[n - 1] *= ip[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) xs[i] = (xs[i] - u[i] * xs[i + 1]) * ip[i];
  }

  Eigen::Index size() const { return inv_pivot_.size(); }

 private:
  Vector lower_, upper_, inv_pivot_;
};

}  // namespace blowup
