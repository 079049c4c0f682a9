#pragma once

#include "bogo/operators.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bogo {

/// Polar diagnostics of A = D^{1/2} E^{−1/2} = W |A|.
struct PolarDiagnostics {
  Eigen::MatrixXd W;   // orthogonal factor
  Eigen::MatrixXd k2;  // log |A|, so that c₂ = W ch k₂ and s₂ = W sh k₂
  double reconstruction_defect = 0.0;  // max |W ch k₂ − c₂|, |W sh k₂ − s₂|
};

struct BogoliubovDiagonalization {
  OperatorMatrix E;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd c2, s2;
  double trace_constant = 0.0;     // −½ Tr(D + K − E)
  double regularized_trace = 0.0;  // ½ Tr(D⁻¹ K²)
  double symplectic_defect = 0.0;  // max |c₂ᵀc₂ − s₂ᵀs₂ − I|
  double s2_frobenius = 0.0;
  double root_defect = 0.0;        // ‖E² − M‖_F / ‖M‖_F
  bool trace_nonnegative = true;   // Tr(D + K − E) ≥ −1e-9 n
  std::optional<PolarDiagnostics> polar;
};

/// Matrix-level core shared with the Fock oracle; D, K plain symmetric matrices.
struct BogoliubovCore {
  Eigen::MatrixXd E;
  Eigen::VectorXd eigenvalues;
  double root_defect = 0.0;
};
BogoliubovCore bogoliubov_core(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K);
/// Eigenvalues of E only, without forming it.
Eigen::VectorXd bogoliubov_eigenvalues(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K);

BogoliubovDiagonalization build_E(const OperatorMatrix& D, const OperatorMatrix& K, bool with_polar = false);

struct DiagonalizingPair {
  Eigen::MatrixXd c2, s2;
  double symplectic_defect = 0.0;
  double s2_frobenius = 0.0;
};
DiagonalizingPair diagonalizing_pair(const Eigen::MatrixXd& D, const Eigen::MatrixXd& E);
DiagonalizingPair diagonalizing_pair(const OperatorMatrix& D, const OperatorMatrix& E);
PolarDiagnostics polar_diagnostics(const Eigen::MatrixXd& D, const Eigen::MatrixXd& E, const DiagonalizingPair& pair);

struct TraceConstants {
  double trace_constant = 0.0;     // −½ Tr(D + K − E)
  double regularized_trace = 0.0;  // ½ Tr(D⁻¹K²)
  double raw_trace = 0.0;          // Tr(D + K − E)
};
TraceConstants ground_energy_constant(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K, const Eigen::MatrixXd& E);
TraceConstants ground_energy_constant(const OperatorMatrix& D, const OperatorMatrix& K, const OperatorMatrix& E);

/// Torus fast path: all three operators are diagonal in the plane-wave basis,
/// so every quantity reduces to per-shell scalars with multiplicities.
struct TorusShell {
  long n2;            // |p|² / (2π)²
  long multiplicity;  // lattice points on the shell
  double p, d, k, e;  // |p|, |p|², kernel symbol, √(d(d + 2k))
};
struct TorusBogoliubov {
  std::vector<TorusShell> shells;
  std::size_t modes = 0;
  TraceConstants traces;
};
/// Shells 0 < |p| ≤ p_max with K symbol `k_symbol(|p|)`.
TorusBogoliubov torus_bogoliubov(double p_max, const std::function<double(double)>& k_symbol);

/// Constant terms of the second-order energy expansion.
struct SecondOrderEnergy {
  double N = 0.0, ell = 0.0;
  double gp_term = 0.0;           // N E_GP(φ)
  double scattering_term = 0.0;   // −½ ∫ N³(V_N f_N ∗ φ²) φ²
  double correlation_term = 0.0;  // −(N⁴/2) ∫ ((ω_{ℓ,N} ε_{ℓ,N}) ∗ φ²) φ²
  double trace_term = 0.0;        // ½ Tr(E − D − K)
  double total = 0.0;
};
SecondOrderEnergy second_order_energy(const GPState& state, const TruncatedScattering& trunc, double trace_constant);
SecondOrderEnergy second_order_energy(const GPState& state, const TruncatedScattering& trunc,
                                      const BogoliubovDiagonalization& diag);

/// Per-level gaps |λ_L(E(ℓ)) − λ_L(E_∞)| / λ_L(E(ℓ)) over an ℓ-sweep.
struct ConvergenceTable {
  std::vector<double> ell;                       // sorted descending
  Eigen::VectorXd limit;                         // λ_L(E_∞), L < levels
  std::vector<Eigen::VectorXd> values;           // λ_L(E(ℓ_k))
  std::vector<Eigen::VectorXd> gaps;             // relative gaps per ℓ
  std::vector<Eigen::VectorXd> halving_ratios;   // gap(ℓ_k) / gap(ℓ_{k+1})
  Eigen::VectorXd exponents;                     // fitted slope of log gap vs log ℓ
  bool exponent_pass = false;                    // all ≥ 1.8
  bool ratio_pass = false;                       // all halving ratios in [3, 5.5]
};

/// Works on sorted eigenvalue lists so several channels (with multiplicity)
/// can be merged before the comparison.
ConvergenceTable convergence_table(const std::vector<double>& ell, const std::vector<Eigen::VectorXd>& eigenvalues,
                                   const Eigen::VectorXd& limit, int levels = 5);
ConvergenceTable compare_E_to_Einf(const OperatorMatrix& D, const std::vector<double>& ell,
                                   const std::vector<OperatorMatrix>& K_family, const OperatorMatrix& K_limit,
                                   int levels = 5);

/// Concatenates per-channel eigenvalues, each repeated 2l+1 times, and sorts.
Eigen::VectorXd merge_channels(const std::vector<Eigen::VectorXd>& per_channel, const std::vector<int>& l_values);

}  // namespace bogo
