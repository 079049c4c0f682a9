#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace bogo {

enum class KineticScheme { Spectral, FiniteDifference };

KineticScheme parse_kinetic(const std::string& name);
std::string to_string(KineticScheme k);

/// Radial grid r_j = j h, j = 1..points, Dirichlet at 0 and r_max.
struct RadialGrid {
  double r_max = 7.0;
  int points = 400;
  KineticScheme kinetic = KineticScheme::Spectral;
};

/// Cube [−L, L]³ with `points` interior nodes per axis, Dirichlet walls.
struct CartesianGrid {
  double half_width = 4.5;
  int points = 12;
  KineticScheme kinetic = KineticScheme::Spectral;
};

/// Unit torus; the condensate is the constant function.
struct TorusGrid {};

using Discretization = std::variant<RadialGrid, CartesianGrid, TorusGrid>;

bool same_discretization(const Discretization& a, const Discretization& b);
std::string describe(const Discretization& d);

/// −d²/dx² on n interior nodes of (a, b) with Dirichlet ends. Both schemes are
/// diagonalized by the discrete sine transform S (orthogonal, symmetric).
struct Kinetic1D {
  Kinetic1D(double a, double b, int n, KineticScheme scheme);

  double a, b, h;
  int n;
  KineticScheme scheme;
  Eigen::VectorXd nodes;
  Eigen::MatrixXd S;       // S_jk = √(2/(n+1)) sin(π jk/(n+1))
  Eigen::VectorXd lambda;  // eigenvalues of T
  Eigen::MatrixXd T;
  Eigen::MatrixXd first_derivative;  // d/dx of the sine interpolant, at the nodes
};

/// Spatial discretization for trapped problems. Coefficients c_j = √w_j φ(x_j)
/// are orthonormal coordinates: ∫ φ ψ = Σ c_j d_j.
class Mesh {
 public:
  explicit Mesh(const Discretization& d);

  const Discretization& discretization() const { return disc_; }
  bool radial() const { return std::holds_alternative<RadialGrid>(disc_); }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double spacing() const { return axis_->h; }
  int points_per_axis() const { return axis_->n; }
  const Kinetic1D& axis() const { return *axis_; }

  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& radii() const { return radii_; }
  Eigen::Vector3d point(std::size_t j) const;

  /// Kinetic operator −Δ (plus l(l+1)/r² in a radial channel) in coefficient coordinates.
  Eigen::VectorXd apply_kinetic(const Eigen::VectorXd& c) const;
  /// Spectral kinetic energy Σ λ_k |ĉ_k|² of the l = 0 operator.
  double kinetic_energy(const Eigen::VectorXd& c) const;
  /// (I + dt (T + shift))⁻¹ c, exact in the sine basis.
  Eigen::VectorXd solve_shifted(const Eigen::VectorXd& c, double dt, double shift) const;
  Eigen::MatrixXd kinetic_matrix(int angular_momentum = 0) const;
  /// Indices of nodes on the outer boundary layer (largest r, or faces of the box).
  std::vector<std::size_t> boundary_nodes() const;

 private:
  Eigen::VectorXd transform3(const Eigen::VectorXd& c) const;

  Discretization disc_;
  std::shared_ptr<const Kinetic1D> axis_;
  Eigen::VectorXd weights_, radii_;
};

}  // namespace bogo
