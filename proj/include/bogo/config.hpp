#pragma once

#include "bogo/gp.hpp"
#include "bogo/mesh.hpp"
#include "bogo/scattering.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bogo {

using Json = nlohmann::ordered_json;

struct PotentialSpec {
  std::string family = "soft_sphere";  // zero | soft_sphere | smooth_bump | tabulated
  double radius = 1.0;
  double height = 2.0;
  std::string file;  // tabulated: CSV of r,V
};

struct ScatteringSpec {
  double r_max = 8.0;
  int points = 2049;
  std::optional<double> a0;  // fixed value; computed from the potential when absent
};

struct TruncationSpec {
  std::vector<double> N_list = {64, 128, 256, 512, 1024};
  std::vector<double> ell_list = {0.5, 0.25, 0.125, 0.0625};
  std::string profile = "smoothstep";
  int points_per_piece = 256;
  double scaling_tolerance = 0.15;
};

struct TrapSpec {
  std::string kind = "harmonic";  // flat | harmonic | anisotropic | quartic | tabulated
  double omega = 1.0;
  std::vector<double> frequencies = {1.0, 1.0, 1.0};
  double c2 = 1.0, c4 = 0.0;
  std::string file;
};

struct GridSpec {
  std::string kind = "radial";  // radial | cartesian | torus
  double extent = 6.5;          // r_max or box half-width
  int points = 400;
  std::string kinetic = "spectral";
};

struct SpectrumSpec {
  double N = 1000;
  double ell = 0.5;
  std::vector<double> ell_list;  // dyadic ℓ sweep for the E vs E∞ table
  std::vector<int> channels = {0, 1, 2};
  double p_max = 6 * 3.14159265358979323846;
  double lambda_cap = 4.0;
  int levels = 5;
};

struct FockSpec {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd K = Eigen::MatrixXd::Constant(1, 1, 0.3);
  std::vector<int> n_max_list = {10, 20, 30, 40};
  int levels = 8;
  double tolerance = 1e-6;
  std::optional<Eigen::MatrixXd> unitary_k;
  int unitary_n_max = 40;
  int unitary_low_sector = 10;
};

struct VerifySpec {
  int random_cases = 2;
  double pairing_scale = 0.2;  // ‖K‖ / min spec D in random Fock cases; 0 gives K = 0
  bool mutate_pairing_sign = false;
  bool include_trap_sweep = true;
};

struct RunConfig {
  PotentialSpec potential;
  ScatteringSpec scattering;
  TruncationSpec truncation;
  TrapSpec trap;
  GridSpec grid;
  GPOptions gp;
  SpectrumSpec spectrum;
  FockSpec fock;
  VerifySpec verify;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::string base_dir = ".";  // relative file paths resolve here; not serialized
};

Json to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
void validate(const RunConfig& c);

RadialPotential make_potential(const RunConfig& c);
ExternalPotential make_trap(const RunConfig& c);
Discretization make_discretization(const RunConfig& c);
CutoffProfile make_profile(const RunConfig& c);

}  // namespace bogo
