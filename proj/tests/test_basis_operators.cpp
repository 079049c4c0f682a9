#include "bogo/error.hpp"
#include "bogo/numerics.hpp"
#include "bogo/operators.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace bogo;

namespace {

std::shared_ptr<const ScatteringSolution> soft_sphere() {
  static auto s = std::make_shared<ScatteringSolution>(solve_scattering(RadialPotential::soft_sphere(1, 2), 8, 2049));
  return s;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::VectorXd v = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
  std::sort(v.data(), v.data() + v.size());
  return v;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bogo_test_" + name);
}

}  // namespace

TEST_CASE("torus basis counts lattice shells") {
  CHECK(Basis::torus(2 * kPi).dimension() == 6);
  CHECK(Basis::torus(2 * kPi * std::sqrt(2.0)).dimension() == 18);
  CHECK(Basis::torus(2 * kPi * std::sqrt(3.0)).dimension() == 26);
  // Brute-force lattice count for |n| ≤ 3.
  int count = 0;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      for (int k = -3; k <= 3; ++k)
        if (int n2 = i * i + j * j + k * k; n2 > 0 && n2 <= 9) ++count;
  CHECK(Basis::torus(3 * 2 * kPi).dimension() == static_cast<std::size_t>(count));
  CHECK_THROWS_AS(Basis::torus(1.0), Error);
}

TEST_CASE("projected radial basis is an orthonormal frame of the complement of phi") {
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), 0.1, RadialGrid{6.5, 200});
  const Basis b = Basis::radial_channel(s, 0);
  CHECK(b.dimension() == 199);
  const Eigen::MatrixXd B = b.isometry();
  const Eigen::VectorXd c = s.coefficients.normalized();
  CHECK(max_abs(B.transpose() * B - Eigen::MatrixXd::Identity(199, 199)) < 1e-10);
  CHECK((B.transpose() * c).cwiseAbs().maxCoeff() < 1e-10);
  // Gram–Schmidt oracle: the complement projector is I − c cᵀ.
  CHECK(max_abs(B * B.transpose() - (Eigen::MatrixXd::Identity(200, 200) - c * c.transpose())) < 1e-10);
  CHECK(b.gram_defect() < 1e-10);
  CHECK(b.condensate_overlap() < 1e-10);
  CHECK_FALSE(Basis::radial_channel(s, 1).projected());
  CHECK(Basis::radial_channel(s, 1).dimension() == 200);
}

TEST_CASE("Cartesian basis drops exactly one direction") {
  GPOptions o;
  o.boundary_tolerance = 1e-2;
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), 0.0, CartesianGrid{4.5, 8}, o);
  CHECK(Basis::cartesian(s.mesh).dimension() == 512);
  CHECK(Basis::cartesian(s).dimension() == 511);
  CHECK(Basis::cartesian(s).full_dimension() == 512);
}

TEST_CASE("torus D is the kinetic symbol and K_inf is 8 pi a0 times I") {
  const auto b = std::make_shared<const Basis>(Basis::torus(3 * 2 * kPi));
  const GPState t = torus_state(0.1);
  const OperatorMatrix D = assemble_D(b, t);
  const OperatorMatrix K = assemble_K_limit(b, t);
  for (std::size_t i = 0; i < b->dimension(); ++i) {
    CHECK(D.entries(i, i) == doctest::Approx(b->momenta()[i].squaredNorm()).epsilon(1e-12));
    CHECK(K.entries(i, i) == doctest::Approx(8 * kPi * 0.1).epsilon(1e-14));
  }
  CHECK(max_abs(K.entries - 8 * kPi * 0.1 * Eigen::MatrixXd::Identity(b->dimension(), b->dimension())) < 1e-14);
  CHECK(max_abs(assemble_K_limit(b, torus_state(0.0)).entries) == 0.0);
}

TEST_CASE("linear harmonic D has the oscillator excitation spectrum") {
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), 0.0, RadialGrid{6.5, 400});
  const auto b0 = std::make_shared<const Basis>(Basis::radial_channel(s, 0));
  const auto b1 = std::make_shared<const Basis>(Basis::radial_channel(s, 1));
  const auto b2 = std::make_shared<const Basis>(Basis::radial_channel(s, 2));
  const Eigen::VectorXd e0 = sorted_eigenvalues(assemble_D(b0, s).entries);
  const Eigen::VectorXd e1 = sorted_eigenvalues(assemble_D(b1, s).entries);
  const Eigen::VectorXd e2 = sorted_eigenvalues(assemble_D(b2, s).entries);
  // −Δ + r² − 3: 4 n_r + 2 l.
  CHECK(e0(0) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(e0(1) == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(e1(0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(e1(1) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(e2(0) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("D is positive on random excitation vectors") {
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), 0.3, RadialGrid{6.5, 200});
  const auto b = std::make_shared<const Basis>(Basis::radial_channel(s, 0));
  const OperatorMatrix D = assemble_D(b, s);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd v(b->dimension());
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = g(rng);
    CHECK(v.dot(D.entries * v) > 0);
  }
  CHECK(D.symmetry_defect() < 1e-12);
}

TEST_CASE("trace of K_inf matches an independent quadrature") {
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), 0.2, RadialGrid{6.5, 300});
  const auto b = std::make_shared<const Basis>(Basis::radial_channel(s, 0));
  const double g = 8 * kPi * 0.2;
  // Tr Q(gφ²)Q = g (Σ_j φ(r_j)² − ∫φ⁴), with ∫φ⁴ by Simpson on the interpolated profile.
  double sum_phi2 = 0;
  for (std::size_t j = 0; j < s.mesh->size(); ++j) sum_phi2 += s.phi(j) * s.phi(j);
  const Eigen::VectorXd c = s.coefficients.normalized();
  const double overlap = (c.array().square() * s.phi.array().square()).sum();
  CHECK(overlap == doctest::Approx(quartic_integral(s)).epsilon(1e-10));
  CHECK(assemble_K_limit(b, s).entries.trace() == doctest::Approx(g * (sum_phi2 - overlap)).epsilon(1e-10));
  CHECK(assemble_K_limit(b, s).entries.trace() > 0);
}

TEST_CASE("torus K matches an independent transform of N^3 eps") {
  const TruncatedScattering t(soft_sphere(), 0.5, 1000, CutoffProfile::Smoothstep);
  const auto b = std::make_shared<const Basis>(Basis::torus(2 * 2 * kPi));
  const OperatorMatrix K = assemble_K_smeared(b, torus_state(soft_sphere()->a0), t);
  auto simpson_hat = [&](double p) {
    const int n = 4000;
    const double a = 0.25, h = 0.25 / n;
    double acc = 0;
    for (int j = 0; j <= n; ++j) {
      const double r = a + j * h, w = (j == 0 || j == n) ? 1 : (j % 2 ? 4 : 2);
      acc += w * 4 * kPi * r * r * t.eps_scaled(r) * std::sin(p * r) / (p * r);
    }
    return acc * h / 3;
  };
  for (std::size_t i = 0; i < b->dimension(); ++i)
    CHECK(K.entries(i, i) == doctest::Approx(simpson_hat(b->momenta()[i].norm())).epsilon(1e-8));
  // p → 0 recovers the truncation identity.
  CHECK(eps_hat(t, 1e-8) == doctest::Approx(8 * kPi * soft_sphere()->a0).epsilon(1e-5));
}

TEST_CASE("kernel resolution guard") {
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), soft_sphere()->a0, RadialGrid{6.5, 200});
  const auto b = std::make_shared<const Basis>(Basis::radial_channel(s, 0));
  const TruncatedScattering t(soft_sphere(), 0.25, 1000, CutoffProfile::Smoothstep);
  try {
    assemble_K_smeared(b, s, t);
    FAIL("expected UnderresolvedKernel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnderresolvedKernel);
  }
}

TEST_CASE("radial channels agree with a Cartesian box") {
  GPOptions o;
  o.boundary_tolerance = 1e-3;
  const GPState c = minimize_gp(ExternalPotential::harmonic(1.0), 0.0, CartesianGrid{4.4, 13}, o);
  const GPState r = minimize_gp(ExternalPotential::harmonic(1.0), 0.0, RadialGrid{6.5, 400});
  const Eigen::VectorXd ec = sorted_eigenvalues(assemble_D(std::make_shared<const Basis>(Basis::cartesian(c)), c).entries);
  std::vector<double> er;
  for (int l = 0; l <= 2; ++l) {
    const Eigen::VectorXd e = sorted_eigenvalues(assemble_D(std::make_shared<const Basis>(Basis::radial_channel(r, l)), r).entries);
    for (Eigen::Index k = 0; k < 2; ++k)
      for (int m = 0; m < 2 * l + 1; ++m) er.push_back(e(k));
  }
  std::sort(er.begin(), er.end());
  // The lowest nine box levels: 2 ×3 and 4 ×6.
  for (int k = 0; k < 9; ++k) CHECK(ec(k) == doctest::Approx(er[k]).epsilon(1e-4));
}

TEST_CASE("smeared K is symmetric and lives on the complement") {
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), soft_sphere()->a0, RadialGrid{6.5, 400});
  const auto b = std::make_shared<const Basis>(Basis::radial_channel(s, 0));
  const TruncatedScattering t(soft_sphere(), 0.5, 1000, CutoffProfile::Smoothstep);
  const OperatorMatrix K = assemble_K_smeared(b, s, t);
  CHECK(K.symmetry_defect() < 1e-12);
  CHECK(K.dimension() == 399);
  const Eigen::MatrixXd full = K.embedded();
  CHECK((full * s.coefficients.normalized()).cwiseAbs().maxCoeff() < 1e-10);
  // The shell profile makes ε̂ change sign, so K has a negative tail bounded
  // by min ε̂ · max φ².
  double hat_min = 0;
  for (double p = 0; p <= kPi / s.mesh->spacing(); p += 0.25) hat_min = std::min(hat_min, eps_hat(t, p));
  CHECK(hat_min < 0);
  const Eigen::VectorXd ev = sorted_eigenvalues(K.entries);
  const double phi2 = s.phi.cwiseAbs2().maxCoeff();
  CHECK(ev(0) < 0);
  CHECK(ev(0) >= hat_min * phi2 * (1 + 1e-6));
  // K_∞ is a multiplication operator by a nonnegative function.
  const Eigen::VectorXd einf = sorted_eigenvalues(assemble_K_limit(b, s).entries);
  CHECK(einf(0) >= -1e-10 * einf(einf.size() - 1));
}

TEST_CASE("correlation kernel structure and scaling") {
  const auto sol = soft_sphere();
  const GPState s = minimize_gp(ExternalPotential::harmonic(1.0), sol->a0, RadialGrid{6.5, 1700});
  const auto b = std::make_shared<const Basis>(Basis::radial_channel(s, 0));
  std::vector<double> x, op, hs, pointwise;
  for (double ell : {0.25, 0.125, 0.0625}) {
    const TruncatedScattering t(sol, ell, 1000, CutoffProfile::Smoothstep);
    const CorrelationKernel k = assemble_s1(b, s, t);
    CHECK(k.slot_symmetry_defect < 1e-12);
    CHECK(k.op_norm > 0);
    x.push_back(std::log(ell));
    op.push_back(std::log(k.op_norm));
    hs.push_back(std::log(correlation_hs_norm(s, t)));
    pointwise.push_back(projection_defect_constant(k, s));
  }
  CHECK(fit_slope(x, op) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(fit_slope(x, hs) == doctest::Approx(0.5).epsilon(0.4));
  CHECK(*std::max_element(pointwise.begin(), pointwise.end()) /
            *std::min_element(pointwise.begin(), pointwise.end()) <
        1.2);
}

TEST_CASE("torus correlation kernel is the transform of -N omega") {
  const TruncatedScattering t(soft_sphere(), 0.5, 1000, CutoffProfile::Smoothstep);
  const auto b = std::make_shared<const Basis>(Basis::torus(2 * kPi));
  const CorrelationKernel k = assemble_s1(b, torus_state(soft_sphere()->a0), t);
  CHECK(k.matrix.entries(0, 0) == doctest::Approx(-1000 * omega_hat(t, 2 * kPi)));
  CHECK(k.matrix.entries(0, 0) < 0);
  CHECK(k.op_norm == doctest::Approx(std::abs(k.matrix.entries(0, 0))));
}

TEST_CASE("matrix files round-trip") {
  const auto b = std::make_shared<const Basis>(Basis::torus(2 * kPi * std::sqrt(2.0)));
  OperatorMatrix a{b, Eigen::MatrixXd::Random(18, 18), "random"};
  a.entries = symmetrize(a.entries);
  a.entries(0, 1) = a.entries(1, 0) = 1.0 / 3.0;

  const auto csv = temp_file("m.csv");
  write_csv(a.entries, csv.string());
  CHECK(max_abs(read_csv(csv.string()) - a.entries) == 0.0);

  const auto bin = temp_file("m.bgsp");
  write_binary(a, bin.string());
  const BinaryMatrix r = read_binary(bin.string());
  CHECK(r.kind == BasisKind::PlaneWaveTorus);
  CHECK(max_abs(r.entries - a.entries) == 0.0);
  CHECK(std::filesystem::file_size(bin) == 16 + 8 * 18 * 18);
  std::ifstream in(bin, std::ios::binary);
  unsigned char h[16];
  in.read(reinterpret_cast<char*>(h), 16);
  const unsigned char expected[16] = {'B', 'G', 'S', 'P', 1, 0, 0, 0, 18, 0, 0, 0, 1, 0, 0, 0};
  CHECK(std::equal(h, h + 16, expected));

  std::ofstream(bin, std::ios::binary) << "XXXX";
  CHECK_THROWS_AS(read_binary(bin.string()), Error);
  std::filesystem::remove(csv);
  std::filesystem::remove(bin);
}

TEST_CASE("operators refuse a foreign state") {
  const GPState a = minimize_gp(ExternalPotential::harmonic(1.0), 0.1, RadialGrid{6.5, 200});
  const GPState c = minimize_gp(ExternalPotential::harmonic(1.0), 0.1, RadialGrid{6.5, 300});
  const GPState d = minimize_gp(ExternalPotential::harmonic(1.0), 0.3, RadialGrid{6.5, 200});
  const auto b = std::make_shared<const Basis>(Basis::radial_channel(a, 0));
  for (const GPState* s : {&c, &d}) {
    try {
      assemble_D(b, *s);
      FAIL("expected GridMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GridMismatch);
    }
  }
  const auto b2 = std::make_shared<const Basis>(Basis::radial_channel(a, 0));
  CHECK_THROWS_AS(require_same_basis(assemble_D(b, a), assemble_D(b2, a)), Error);
  try {
    assemble_D(std::make_shared<const Basis>(Basis::torus(2 * kPi)), a);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}
