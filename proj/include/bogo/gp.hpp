#pragma once

#include "bogo/mesh.hpp"
#include "bogo/scattering.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bogo {

/// Confining potential V_ext ≥ 0.
class ExternalPotential {
 public:
  enum class Kind { Flat, Harmonic, Anisotropic, Quartic, Tabulated };

  /// V ≡ 0; only meaningful on the torus.
  static ExternalPotential flat();
  /// ω²|x|²; the ground state of −Δ + V has energy 3ω.
  static ExternalPotential harmonic(double omega = 1.0);
  static ExternalPotential anisotropic(double wx, double wy, double wz);
  /// c2 r² + c4 r⁴.
  static ExternalPotential quartic(double c2, double c4);
  /// Radial table, linear in between, continued quadratically past the last row.
  static ExternalPotential tabulated(std::vector<double> r, std::vector<double> v);
  static ExternalPotential from_csv(const std::string& path);

  Kind kind() const { return kind_; }
  std::string name() const;
  bool radial() const { return kind_ != Kind::Anisotropic; }
  double operator()(const Eigen::Vector3d& x) const;
  double radial_value(double r) const;
  /// Per-axis curvature κ_i with V ≈ Σ κ_i x_i² near the origin.
  Eigen::Vector3d curvature() const;
  const Eigen::Vector3d& frequencies() const { return w_; }

 private:
  Kind kind_ = Kind::Flat;
  Eigen::Vector3d w_ = Eigen::Vector3d::Zero();
  double c4_ = 0.0;
  std::vector<double> table_r_, table_v_;
};

struct GPOptions {
  double tol = 1e-8;
  int max_iterations = 20000;
  double boundary_tolerance = 1e-8;
  double initial_step = 1.0;
  double max_step = 1e3;
};

/// Condensate on a discretization. For the torus φ ≡ 1 and mesh is null.
struct GPState {
  Discretization discretization;
  std::shared_ptr<const Mesh> mesh;
  ExternalPotential trap;
  double a0 = 0.0;
  Eigen::VectorXd phi;           // nodal values
  Eigen::VectorXd coefficients;  // √w_j φ_j, unit Euclidean norm
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> energy_history;
  double boundary_value = 0.0;

  bool torus() const { return std::holds_alternative<TorusGrid>(discretization); }
  double coupling() const;
};

GPState torus_state(double a0);

/// Evaluates μ, E_GP and the residual for given coefficients (normalized first).
GPState make_state(const ExternalPotential& trap, double a0, std::shared_ptr<const Mesh> mesh,
                   const Eigen::VectorXd& coefficients);

GPState minimize_gp(const ExternalPotential& trap, double a0, const Discretization& discretization,
                    const GPOptions& options = {});

/// ∫(|∇φ|² + V_ext φ² + 8π a0 φ⁴) with the kinetic term from the spectral coefficients.
double chemical_potential(const GPState& state);
/// ⟨φ, (−Δ + V_ext + 8π a0 φ²) φ⟩ / ⟨φ, φ⟩ with the assembled operator.
double rayleigh_quotient(const GPState& state);
double gp_energy(const GPState& state);
/// ‖(−Δ + V_ext + 8π a0 φ² − μ) φ‖ with μ = state.mu.
double gp_residual(const GPState& state);
double quartic_integral(const GPState& state);

/// Thomas–Fermi chemical potential for V = ω²|x|²: μ = ω^{6/5} (15 a0)^{2/5}.
double thomas_fermi_mu(double a0, double omega);

/// Values of the radial kernel convolution (k ∗ φ²)(r_j) at the mesh nodes,
/// k supported on [a, b]; `breaks` are interior points where k is not smooth.
/// On the torus φ ≡ 1 and the result is the constant ∫k.
Eigen::VectorXd convolve_density(const GPState& state, const std::function<double(double)>& kernel, double a,
                                 double b, const std::vector<double>& breaks = {});

/// ∫ g φ² for nodal values g.
double integrate_against_density(const GPState& state, const Eigen::VectorXd& g);

struct DiluteRow {
  double N;
  double deviation;
};

struct DiluteReport {
  std::vector<DiluteRow> rows;
  std::optional<double> exponent;
  bool pass = false;
};

/// ‖N³(V_N f_N) ∗ φ² − 8π a0 φ²‖ for each N, with the fitted decay exponent.
DiluteReport dilute_limit_check(const ScatteringSolution& sol, const GPState& state, const std::vector<double>& N_list);

}  // namespace bogo
