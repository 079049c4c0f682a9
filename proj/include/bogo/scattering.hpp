#pragma once

#include "bogo/numerics.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bogo {

/// Radial, nonnegative, compactly supported interaction V(r).
class RadialPotential {
 public:
  enum class Family { Zero, SoftSphere, SmoothBump, Tabulated };

  static RadialPotential zero();
  /// V0 on r ≤ R, zero outside.
  static RadialPotential soft_sphere(double radius, double height);
  /// C∞ bump V0·exp(1 − 1/(1 − (r/R)²)) on r < R.
  static RadialPotential smooth_bump(double radius, double height);
  /// Linear interpolation of (r, V) samples; support ends at the last positive sample.
  static RadialPotential tabulated(std::vector<double> r, std::vector<double> v);
  static RadialPotential from_csv(const std::string& path);

  Family family() const { return family_; }
  std::string name() const;
  double support_radius() const { return support_; }
  double height() const { return height_; }

  double operator()(double r) const;
  /// One-sided limit of V at r: side > 0 from above, side < 0 from below.
  double one_sided(double r, int side) const;
  /// ∫ V d³x.
  double volume_integral() const;
  bool is_zero() const { return family_ == Family::Zero; }

 private:
  Family family_ = Family::Zero;
  double support_ = 0.0;
  double height_ = 0.0;
  std::vector<double> table_r_, table_v_;
};

/// Zero-energy scattering solution on a radial grid. u = r f is normalized so
/// that u(r) = r − a0 outside the support.
struct ScatteringSolution {
  RadialPotential potential;
  std::vector<double> r;
  std::vector<double> u, du;
  std::vector<double> f, omega;
  double a0 = 0.0;
  double fit_window[2] = {0.0, 0.0};
  double fit_residual = 0.0;  // max |ω r − a0| over the window
  double residual = 0.0;      // max |−2Δf + V f| over interior nodes
  double r_max = 0.0;
  /// Index of the node at the support radius; the grid is uniform on each side.
  std::size_t support_node = 0;

  double f_at(double s) const;
  double omega_at(double s) const;
  double omega_prime_at(double s) const;

 private:
  friend ScatteringSolution solve_scattering(const RadialPotential&, double, int);
  // Separate pieces inside and outside the support so u'' may jump at R0.
  HermiteInterpolant u_in_, u_out_, du_in_, du_out_;
};

ScatteringSolution solve_scattering(const RadialPotential& v, double r_max, int n_points);

/// (8π)⁻¹ ∫ (2|∇f|² + V f²) with the exterior tail from the fitted asymptote.
double scattering_length_variational(const RadialPotential& v, const ScatteringSolution& sol);

/// (8π)⁻¹ ∫ V f.
double scattering_length_integral(const RadialPotential& v, const ScatteringSolution& sol);

/// Closed-form soft-sphere scattering length R(1 − tanh(κR)/(κR)), κ = √(V0/2).
double soft_sphere_scattering_length(double radius, double height);

enum class CutoffProfile { Smoothstep, Cosine };

CutoffProfile parse_profile(const std::string& name);
std::string to_string(CutoffProfile p);

struct CutoffValue {
  double value, d1, d2;
};

/// χ(t) and its first two derivatives; χ = 1 on t ≤ ½ and 0 on t ≥ 1.
CutoffValue cutoff(CutoffProfile profile, double t);

struct TruncationNorms {
  double l1 = 0, l2 = 0, grad_l1 = 0, grad_l2 = 0;
};

/// ω_{ℓ,N} = χ(·/ℓ) ω(N·) and its defect ε_{ℓ,N}.
class TruncatedScattering {
 public:
  TruncatedScattering(std::shared_ptr<const ScatteringSolution> sol, double ell, double N, CutoffProfile profile,
                      int points_per_piece = 256);

  double ell() const { return ell_; }
  double N() const { return N_; }
  CutoffProfile profile() const { return profile_; }
  const ScatteringSolution& solution() const { return *sol_; }
  std::shared_ptr<const ScatteringSolution> solution_ptr() const { return sol_; }
  double a0() const { return sol_->a0; }

  double omega(double r) const;
  double omega_prime(double r) const;
  double eps(double r) const;
  /// N³ ε_{ℓ,N}(r); independent of N when ℓ > 2R0/N.
  double eps_scaled(double r) const;

  /// Radial grid (weights for ∫ dr) on [0, ℓ] with breakpoints at R0/N and ℓ/2.
  const Quadrature& grid() const { return grid_; }
  std::vector<double> omega_values() const;
  std::vector<double> eps_values() const;

  /// ∫ N³ ε_{ℓ,N} d³x.
  double integral_eps_scaled() const;
  TruncationNorms norms() const;
  /// max over the support of ℓ³ N³ |ε_{ℓ,N}|.
  double pointwise_constant() const;

 private:
  std::shared_ptr<const ScatteringSolution> sol_;
  double ell_, N_;
  CutoffProfile profile_;
  Quadrature grid_;
};

struct ScalingRow {
  double N, ell;
  TruncationNorms norms;
  double integral_eps_scaled;
  double pointwise_constant;
};

struct ScalingExponent {
  std::string name;
  double expected_N, expected_ell;
  std::optional<double> N_exponent, ell_exponent;
  bool pass = false;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  std::vector<ScalingExponent> exponents;
  bool pass = false;
};

ScalingReport truncation_scaling_report(std::shared_ptr<const ScatteringSolution> sol,
                                        const std::vector<double>& N_list, const std::vector<double>& ell_list,
                                        CutoffProfile profile = CutoffProfile::Smoothstep,
                                        double tolerance = 0.15);

}  // namespace bogo
