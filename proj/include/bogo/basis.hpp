#pragma once

#include "bogo/gp.hpp"
#include "bogo/mesh.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace bogo {

enum class BasisKind : std::uint32_t { PlaneWaveTorus = 1, RadialChannel = 2, CartesianBox = 3 };

std::string to_string(BasisKind k);

/// Orthonormal basis of the condensate-orthogonal subspace. Grid bases hold
/// the nodal (DVR) coordinates of the mesh; when φ lives in the same space the
/// first Householder column is dropped so the remaining columns span {φ}^⊥.
class Basis {
 public:
  /// Plane waves e^{ipx}, p ∈ 2πℤ³, 0 < |p| ≤ p_max.
  static Basis torus(double p_max);
  /// Angular channel l on the state's radial mesh; l = 0 is projected against φ.
  static Basis radial_channel(const GPState& state, int angular_momentum);
  /// Nodal box functions; projected against φ when a state is given.
  static Basis cartesian(const GPState& state);
  static Basis cartesian(std::shared_ptr<const Mesh> mesh);

  BasisKind kind() const { return kind_; }
  std::size_t dimension() const;
  std::size_t full_dimension() const;
  bool projected() const { return projected_; }

  const std::vector<Eigen::Vector3d>& momenta() const { return momenta_; }
  double p_max() const { return p_max_; }
  int angular_momentum() const { return l_; }
  std::shared_ptr<const Mesh> mesh() const { return mesh_; }
  /// Unit coefficient vector of φ in the full coordinates (empty if unprojected).
  const Eigen::VectorXd& condensate() const { return phi_; }

  /// Bᵀ A B for a full-space matrix A.
  Eigen::MatrixXd restrict(const Eigen::MatrixXd& full) const;
  /// B a Bᵀ.
  Eigen::MatrixXd embed(const Eigen::MatrixXd& a) const;
  Eigen::VectorXd embed(const Eigen::VectorXd& a) const;
  /// Dense B (full × dimension).
  Eigen::MatrixXd isometry() const;

  /// max |BᵀB − I| and max_j |⟨φ, b_j⟩| as recorded at construction.
  double gram_defect() const { return gram_defect_; }
  double condensate_overlap() const { return overlap_; }
  std::string describe() const;

 private:
  void project_against(const Eigen::VectorXd& phi);
  // H A H with H = I − τ v vᵀ, O(n²).
  Eigen::MatrixXd reflect(const Eigen::MatrixXd& a) const;

  BasisKind kind_ = BasisKind::PlaneWaveTorus;
  std::vector<Eigen::Vector3d> momenta_;
  double p_max_ = 0.0;
  int l_ = 0;
  std::shared_ptr<const Mesh> mesh_;
  bool projected_ = false;
  Eigen::VectorXd phi_, v_;
  double tau_ = 0.0;
  double gram_defect_ = 0.0, overlap_ = 0.0;
};

/// Dense real symmetric one-body operator in a basis.
struct OperatorMatrix {
  std::shared_ptr<const Basis> basis;
  Eigen::MatrixXd entries;
  std::string label;

  std::size_t dimension() const { return static_cast<std::size_t>(entries.rows()); }
  double symmetry_defect() const;
  /// The operator in the full (unprojected) coordinates: B A Bᵀ.
  Eigen::MatrixXd embedded() const { return basis->embed(entries); }
};

void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b);

/// Row-major CSV with 17 significant digits.
void write_csv(const Eigen::MatrixXd& a, const std::string& path);
Eigen::MatrixXd read_csv(const std::string& path);

/// Binary container: 16-byte little-endian header {"BGSP", u32 version = 1,
/// u32 n, u32 basis kind}, then n² float64 in row-major order.
void write_binary(const OperatorMatrix& a, const std::string& path);
struct BinaryMatrix {
  BasisKind kind;
  Eigen::MatrixXd entries;
};
BinaryMatrix read_binary(const std::string& path);

}  // namespace bogo
