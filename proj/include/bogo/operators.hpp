#pragma once

#include "bogo/basis.hpp"
#include "bogo/gp.hpp"
#include "bogo/scattering.hpp"

#include <memory>

namespace bogo {

using BasisPtr = std::shared_ptr<const Basis>;

/// Q(−Δ + V_ext + 8π a0 φ² − μ)Q.
OperatorMatrix assemble_D(const BasisPtr& basis, const GPState& state);
/// Q(8π a0 φ²)Q.
OperatorMatrix assemble_K_limit(const BasisPtr& basis, const GPState& state);
/// Q K̃ Q with K̃(x, y) = φ(x) N³ε_{ℓ,N}(x − y) φ(y).
OperatorMatrix assemble_K_smeared(const BasisPtr& basis, const GPState& state, const TruncatedScattering& trunc);
/// Q(−Δ)Q, used for the ∇₁s₁ diagnostics.
OperatorMatrix assemble_kinetic(const BasisPtr& basis);

/// s₁ = Q⊗Q s̃₁ with s̃₁(x, y) = −N ω_{ℓ,N}(x − y) φ(x) φ(y).
struct CorrelationKernel {
  OperatorMatrix matrix;
  Eigen::MatrixXd unprojected;  // s̃₁ in the full coordinates
  double N = 0.0, ell = 0.0;
  double op_norm = 0.0;       // largest |eigenvalue|
  double hs_norm = 0.0;       // Frobenius
  double grad_op_norm = 0.0;  // ‖(−Δ)^{1/2} s₁‖
  double grad_hs_norm = 0.0;
  double slot_symmetry_defect = 0.0;
};

CorrelationKernel assemble_s1(const BasisPtr& basis, const GPState& state, const TruncatedScattering& trunc);

/// Full-space ‖s̃₁‖_HS = (N² ∫ (ω²_{ℓ,N} ∗ φ²) φ²)^{1/2}, all partial waves at once.
double correlation_hs_norm(const GPState& state, const TruncatedScattering& trunc);

/// max |s₁(x,y) + Nφ(x)φ(y)ω_{ℓ,N}(x−y)| / (ℓ² φ(x)φ(y)) over node pairs where
/// φ(x)φ(y) exceeds `floor` times its maximum. s-wave radial channel only.
double projection_defect_constant(const CorrelationKernel& s1, const GPState& state, double floor = 1e-3);

/// N³ε̂_{ℓ,N}(p) = ∫ 4π r² N³ε_{ℓ,N}(r) sinc(p r) dr.
double eps_hat(const TruncatedScattering& trunc, double p);
/// ω̂_{ℓ,N}(p).
double omega_hat(const TruncatedScattering& trunc, double p);

}  // namespace bogo
