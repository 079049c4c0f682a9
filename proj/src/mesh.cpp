#include "bogo/mesh.hpp"

#include "bogo/error.hpp"
#include "bogo/numerics.hpp"

#include <cmath>
#include <sstream>

namespace bogo {

KineticScheme parse_kinetic(const std::string& name) {
  if (name == "spectral") return KineticScheme::Spectral;
  if (name == "fd2" || name == "finite_difference") return KineticScheme::FiniteDifference;
  throw Error(ErrorCode::ConfigError, "unknown kinetic scheme '" + name + "'");
}

std::string to_string(KineticScheme k) { return k == KineticScheme::Spectral ? "spectral" : "fd2"; }

bool same_discretization(const Discretization& a, const Discretization& b) {
  if (a.index() != b.index()) return false;
  if (auto* ra = std::get_if<RadialGrid>(&a)) {
    const auto& rb = std::get<RadialGrid>(b);
    return ra->r_max == rb.r_max && ra->points == rb.points && ra->kinetic == rb.kinetic;
  }
  if (auto* ca = std::get_if<CartesianGrid>(&a)) {
    const auto& cb = std::get<CartesianGrid>(b);
    return ca->half_width == cb.half_width && ca->points == cb.points && ca->kinetic == cb.kinetic;
  }
  return true;
}

std::string describe(const Discretization& d) {
  std::ostringstream s;
  if (auto* r = std::get_if<RadialGrid>(&d))
    s << "radial(r_max=" << r->r_max << ", points=" << r->points << ", " << to_string(r->kinetic) << ")";
  else if (auto* c = std::get_if<CartesianGrid>(&d))
    s << "cartesian(L=" << c->half_width << ", points=" << c->points << "^3, " << to_string(c->kinetic) << ")";
  else
    s << "torus";
  return s.str();
}

Kinetic1D::Kinetic1D(double a_, double b_, int n_, KineticScheme scheme_)
    : a(a_), b(b_), h((b_ - a_) / (n_ + 1)), n(n_), scheme(scheme_) {
  require(n >= 2 && b > a, ErrorCode::InvalidArgument, "grid needs at least 2 interior nodes on a nonempty interval");
  nodes.resize(n);
  for (int j = 0; j < n; ++j) nodes(j) = a + (j + 1) * h;
  S.resize(n, n);
  const double norm = std::sqrt(2.0 / (n + 1));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) S(j, k) = norm * std::sin(kPi * (j + 1) * (k + 1) / (n + 1));
  lambda.resize(n);
  for (int k = 0; k < n; ++k) {
    const double theta = kPi * (k + 1) / (n + 1);
    lambda(k) = scheme == KineticScheme::Spectral ? std::pow((k + 1) * kPi / (b - a), 2)
                                                  : (2.0 - 2.0 * std::cos(theta)) / (h * h);
  }
  T = symmetrize(S * lambda.asDiagonal() * S);
  // Derivative of the sine series through the nodal values.
  Eigen::MatrixXd C(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      C(j, k) = norm * ((k + 1) * kPi / (b - a)) * std::cos(kPi * (j + 1) * (k + 1) / (n + 1));
  first_derivative = C * S;
}

Mesh::Mesh(const Discretization& d) : disc_(d) {
  if (auto* r = std::get_if<RadialGrid>(&d)) {
    require(r->r_max > 0 && r->points >= 8, ErrorCode::InvalidArgument, "radial grid needs r_max > 0 and >= 8 points");
    axis_ = std::make_shared<Kinetic1D>(0.0, r->r_max, r->points, r->kinetic);
    radii_ = axis_->nodes;
    weights_ = (4 * kPi * axis_->h) * radii_.array().square();
  } else if (auto* c = std::get_if<CartesianGrid>(&d)) {
    require(c->half_width > 0 && c->points >= 2, ErrorCode::InvalidArgument, "box needs L > 0 and >= 2 points");
    require(std::pow(c->points, 3) <= 8000, ErrorCode::DimensionOverflow, "Cartesian box limited to 20^3 nodes");
    axis_ = std::make_shared<Kinetic1D>(-c->half_width, c->half_width, c->points, c->kinetic);
    const int n = c->points;
    weights_ = Eigen::VectorXd::Constant(n * n * n, std::pow(axis_->h, 3));
    radii_.resize(n * n * n);
    for (std::size_t j = 0; j < size(); ++j) radii_(j) = point(j).norm();
  } else {
    throw Error(ErrorCode::InvalidArgument, "the torus has no spatial mesh");
  }
}

Eigen::Vector3d Mesh::point(std::size_t j) const {
  if (radial()) return {radii_(j), 0, 0};
  const std::size_t n = axis_->n;
  return {axis_->nodes(j / (n * n)), axis_->nodes((j / n) % n), axis_->nodes(j % n)};
}

// Applies S ⊗ S ⊗ S to an n³ array with index (i n + j) n + k. Each pass
// transforms the fastest index and rotates it to the slowest position, so three
// passes restore the layout. S is its own inverse.
Eigen::VectorXd Mesh::transform3(const Eigen::VectorXd& c) const {
  const int n = axis_->n;
  Eigen::VectorXd x = c;
  Eigen::VectorXd z(n * n * n);
  for (int pass = 0; pass < 3; ++pass) {
    Eigen::Map<const Eigen::MatrixXd> m(x.data(), n, n * n);
    const Eigen::MatrixXd y = axis_->S * m;
    for (int col = 0; col < n * n; ++col)
      for (int k = 0; k < n; ++k) z(k * n * n + col) = y(k, col);
    std::swap(x, z);
  }
  return x;
}

Eigen::VectorXd Mesh::apply_kinetic(const Eigen::VectorXd& c) const {
  if (radial()) return axis_->T * c;
  const int n = axis_->n;
  Eigen::VectorXd hat = transform3(c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        hat((i * n + j) * n + k) *= axis_->lambda(i) + axis_->lambda(j) + axis_->lambda(k);
  return transform3(hat);
}

double Mesh::kinetic_energy(const Eigen::VectorXd& c) const {
  if (radial()) {
    const Eigen::VectorXd hat = axis_->S * c;
    return hat.dot(axis_->lambda.cwiseProduct(hat));
  }
  const int n = axis_->n;
  const Eigen::VectorXd hat = transform3(c);
  double e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = hat((i * n + j) * n + k);
        e += (axis_->lambda(i) + axis_->lambda(j) + axis_->lambda(k)) * v * v;
      }
  return e;
}

Eigen::VectorXd Mesh::solve_shifted(const Eigen::VectorXd& c, double dt, double shift) const {
  if (radial()) {
    Eigen::VectorXd hat = axis_->S * c;
    for (int k = 0; k < hat.size(); ++k) hat(k) /= 1.0 + dt * (axis_->lambda(k) + shift);
    return axis_->S * hat;
  }
  const int n = axis_->n;
  Eigen::VectorXd hat = transform3(c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        hat((i * n + j) * n + k) /= 1.0 + dt * (axis_->lambda(i) + axis_->lambda(j) + axis_->lambda(k) + shift);
  return transform3(hat);
}

Eigen::MatrixXd Mesh::kinetic_matrix(int l) const {
  if (radial()) {
    Eigen::MatrixXd t = axis_->T;
    if (l > 0) t.diagonal().array() += l * (l + 1.0) / radii_.array().square();
    return t;
  }
  const int n = axis_->n;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd& T = axis_->T;
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n * n * n, n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int row = (i * n + j) * n + k;
        for (int m = 0; m < n; ++m) {
          full(row, (m * n + j) * n + k) += T(i, m);
          full(row, (i * n + m) * n + k) += T(j, m);
          full(row, (i * n + j) * n + m) += T(k, m);
        }
      }
  return full;
}

std::vector<std::size_t> Mesh::boundary_nodes() const {
  std::vector<std::size_t> out;
  if (radial()) {
    out.push_back(size() - 1);
    return out;
  }
  const std::size_t n = axis_->n;
  for (std::size_t j = 0; j < size(); ++j) {
    const std::size_t i0 = j / (n * n), i1 = (j / n) % n, i2 = j % n;
    if (i0 == 0 || i1 == 0 || i2 == 0 || i0 == n - 1 || i1 == n - 1 || i2 == n - 1) out.push_back(j);
  }
  return out;
}

}  // namespace bogo
