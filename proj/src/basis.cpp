#include "bogo/basis.hpp"

#include "bogo/error.hpp"
#include "bogo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bogo {

std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::PlaneWaveTorus: return "plane_wave_torus";
    case BasisKind::RadialChannel: return "radial_channel";
    case BasisKind::CartesianBox: return "cartesian_box";
  }
  return "unknown";
}

Basis Basis::torus(double p_max) {
  require(p_max >= 2 * kPi * (1 - 1e-12), ErrorCode::DegenerateQuadrature, "torus basis needs p_max >= 2π");
  require(p_max <= 2 * kPi * 40, ErrorCode::DimensionOverflow, "torus cutoff too large");
  Basis b;
  b.kind_ = BasisKind::PlaneWaveTorus;
  b.p_max_ = p_max;
  const int m = static_cast<int>(std::floor(p_max / (2 * kPi) + 1e-9));
  const double cap = std::pow(p_max / (2 * kPi), 2) * (1 + 1e-12);
  std::vector<std::array<int, 3>> ns;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        const int n2 = i * i + j * j + k * k;
        if (n2 > 0 && n2 <= cap) ns.push_back({i, j, k});
      }
  std::stable_sort(ns.begin(), ns.end(), [](const auto& a, const auto& c) {
    return a[0] * a[0] + a[1] * a[1] + a[2] * a[2] < c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
  });
  for (const auto& n : ns) b.momenta_.push_back(2 * kPi * Eigen::Vector3d(n[0], n[1], n[2]));
  return b;
}

Basis Basis::radial_channel(const GPState& state, int l) {
  require(!state.torus() && state.mesh && state.mesh->radial(), ErrorCode::InvalidArgument,
          "radial channel needs a radial state");
  require(l >= 0, ErrorCode::InvalidArgument, "angular momentum must be nonnegative");
  Basis b;
  b.kind_ = BasisKind::RadialChannel;
  b.l_ = l;
  b.mesh_ = state.mesh;
  // φ is spherically symmetric, so only the s-wave channel meets it.
  if (l == 0) b.project_against(state.coefficients);
  return b;
}

Basis Basis::cartesian(const GPState& state) {
  require(!state.torus() && state.mesh && !state.mesh->radial(), ErrorCode::InvalidArgument,
          "Cartesian basis needs a Cartesian state");
  Basis b = cartesian(state.mesh);
  b.project_against(state.coefficients);
  return b;
}

Basis Basis::cartesian(std::shared_ptr<const Mesh> mesh) {
  require(mesh && !mesh->radial(), ErrorCode::InvalidArgument, "Cartesian basis needs a box mesh");
  Basis b;
  b.kind_ = BasisKind::CartesianBox;
  b.mesh_ = std::move(mesh);
  return b;
}

void Basis::project_against(const Eigen::VectorXd& phi) {
  const double norm = phi.norm();
  require(norm > 0 && std::isfinite(norm), ErrorCode::DegenerateQuadrature, "condensate has zero norm");
  require(mesh_->weights().minCoeff() > 0, ErrorCode::DegenerateQuadrature, "nonpositive quadrature weight");
  phi_ = phi / norm;
  // Householder reflector mapping φ to −sign(φ₀) e₀; the other columns span {φ}^⊥.
  v_ = phi_;
  const double s = phi_(0) >= 0 ? 1.0 : -1.0;
  v_(0) += s;
  tau_ = 2.0 / v_.squaredNorm();
  projected_ = true;
  Eigen::VectorXd hphi = phi_ - tau_ * v_ * v_.dot(phi_);
  overlap_ = hphi.size() > 1 ? hphi.tail(hphi.size() - 1).cwiseAbs().maxCoeff() : 0.0;
  // HᵀH − I = (τ²|v|² − 2τ) v vᵀ.
  gram_defect_ = std::abs(tau_ * tau_ * v_.squaredNorm() - 2 * tau_) * v_.cwiseAbs().maxCoeff() *
                 v_.cwiseAbs().maxCoeff();
  require(gram_defect_ < 1e-10 && overlap_ < 1e-10, ErrorCode::DegenerateQuadrature,
          "projected basis failed its orthonormality check");
}

std::size_t Basis::full_dimension() const {
  if (kind_ == BasisKind::PlaneWaveTorus) return momenta_.size();
  return mesh_->size();
}

std::size_t Basis::dimension() const { return full_dimension() - (projected_ ? 1 : 0); }

Eigen::MatrixXd Basis::reflect(const Eigen::MatrixXd& a) const {
  const Eigen::VectorXd av = a * v_;
  const Eigen::RowVectorXd va = v_.transpose() * a;
  const double vav = v_.dot(av);
  Eigen::MatrixXd out = a - tau_ * v_ * va - tau_ * av * v_.transpose();
  out.noalias() += (tau_ * tau_ * vav) * v_ * v_.transpose();
  return out;
}

Eigen::MatrixXd Basis::restrict(const Eigen::MatrixXd& full) const {
  require(static_cast<std::size_t>(full.rows()) == full_dimension() && full.rows() == full.cols(),
          ErrorCode::GridMismatch, "matrix does not match the basis");
  if (!projected_) return full;
  const Eigen::Index n = full.rows();
  return reflect(full).bottomRightCorner(n - 1, n - 1);
}

Eigen::MatrixXd Basis::embed(const Eigen::MatrixXd& a) const {
  require(static_cast<std::size_t>(a.rows()) == dimension() && a.rows() == a.cols(), ErrorCode::GridMismatch,
          "matrix does not match the basis");
  if (!projected_) return a;
  const Eigen::Index n = a.rows() + 1;
  Eigen::MatrixXd pad = Eigen::MatrixXd::Zero(n, n);
  pad.bottomRightCorner(n - 1, n - 1) = a;
  return reflect(pad);
}

Eigen::VectorXd Basis::embed(const Eigen::VectorXd& a) const {
  if (!projected_) return a;
  Eigen::VectorXd pad = Eigen::VectorXd::Zero(a.size() + 1);
  pad.tail(a.size()) = a;
  return pad - tau_ * v_ * v_.dot(pad);
}

Eigen::MatrixXd Basis::isometry() const {
  const Eigen::Index n = static_cast<Eigen::Index>(full_dimension());
  if (!projected_) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - tau_ * v_ * v_.transpose();
  return h.rightCols(n - 1);
}

std::string Basis::describe() const {
  std::ostringstream s;
  s << to_string(kind_);
  if (kind_ == BasisKind::PlaneWaveTorus) s << "(p_max=" << p_max_ << ")";
  if (kind_ == BasisKind::RadialChannel) s << "(l=" << l_ << ", " << bogo::describe(mesh_->discretization()) << ")";
  if (kind_ == BasisKind::CartesianBox) s << "(" << bogo::describe(mesh_->discretization()) << ")";
  s << " dim=" << dimension();
  return s.str();
}

double OperatorMatrix::symmetry_defect() const { return bogo::symmetry_defect(entries); }

void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
  require(a.basis && b.basis && a.basis == b.basis && a.dimension() == b.dimension(), ErrorCode::GridMismatch,
          "operators '" + a.label + "' and '" + b.label + "' live in different bases");
}

}  // namespace bogo
