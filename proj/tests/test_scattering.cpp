#include "bogo/error.hpp"
#include "bogo/numerics.hpp"
#include "bogo/scattering.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace bogo;

namespace {

std::shared_ptr<const ScatteringSolution> soft_sphere_solution(int n = 2049) {
  return std::make_shared<ScatteringSolution>(solve_scattering(RadialPotential::soft_sphere(1, 2), 8, n));
}

// RK4 shooting for u'' = (V0/2) u on [0, R]; a0 = R − u(R)/u'(R).
double shoot_soft_sphere(double R, double V0, int n) {
  const double h = R / n, k = V0 / 2;
  double u = 0, du = 1;
  for (int j = 0; j < n; ++j) {
    const double k1u = du, k1d = k * u;
    const double k2u = du + 0.5 * h * k1d, k2d = k * (u + 0.5 * h * k1u);
    const double k3u = du + 0.5 * h * k2d, k3d = k * (u + 0.5 * h * k2u);
    const double k4u = du + h * k3d, k4d = k * (u + h * k3u);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += h / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
  }
  return R - u / du;
}

}  // namespace

TEST_CASE("zero potential has zero scattering length and f = 1") {
  const ScatteringSolution s = solve_scattering(RadialPotential::zero(), 8, 1024);
  CHECK(s.a0 == 0.0);
  for (double f : s.f) CHECK(f == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(scattering_length_variational(s.potential, s) == 0.0);
  CHECK(scattering_length_integral(s.potential, s) == 0.0);
}

TEST_CASE("soft sphere: three routes agree with the closed form and a shooting oracle") {
  const double exact = 1 - std::tanh(1.0);
  CHECK(soft_sphere_scattering_length(1, 2) == doctest::Approx(exact).epsilon(1e-15));
  CHECK(shoot_soft_sphere(1, 2, 4000) == doctest::Approx(exact).epsilon(1e-6));
  const auto s = soft_sphere_solution();
  CHECK(std::abs(s->a0 - exact) / exact < 1e-6);
  CHECK(std::abs(scattering_length_variational(s->potential, *s) - exact) / exact < 1e-6);
  CHECK(std::abs(scattering_length_integral(s->potential, *s) - exact) / exact < 1e-6);
}

TEST_CASE("outside the support omega(r) r is constant") {
  const auto s = soft_sphere_solution();
  for (std::size_t j = 0; j < s->r.size(); ++j)
    if (s->r[j] >= 2.0) CHECK(std::abs(s->omega[j] * s->r[j] - s->a0) < 1e-8);
  CHECK(s->fit_window[0] == doctest::Approx(2.0));
  CHECK(s->fit_window[1] == doctest::Approx(8.0));
}

TEST_CASE("f lies in [0,1] and omega decreases past the support") {
  for (const auto& V : {RadialPotential::soft_sphere(1, 2), RadialPotential::smooth_bump(1.5, 5)}) {
    const ScatteringSolution s = solve_scattering(V, 10, 2049);
    for (double f : s.f) {
      CHECK(f >= -1e-14);
      CHECK(f <= 1 + 1e-14);
    }
    for (std::size_t j = 1; j < s.r.size(); ++j)
      if (s.r[j - 1] >= V.support_radius()) CHECK(s.omega[j] <= s.omega[j - 1] + 1e-15);
  }
}

TEST_CASE("variational value stays below the first Born approximation") {
  for (const auto& V :
       {RadialPotential::soft_sphere(1, 2), RadialPotential::soft_sphere(0.5, 20), RadialPotential::smooth_bump(1, 8)}) {
    const ScatteringSolution s = solve_scattering(V, 8, 2049);
    const double a = scattering_length_variational(V, s);
    CHECK(a > 0);
    CHECK(a <= V.volume_integral() / (8 * kPi));
    CHECK(std::abs(a - s.a0) / s.a0 < 1e-5);
    CHECK(std::abs(scattering_length_integral(V, s) - s.a0) / s.a0 < 1e-5);
  }
}

TEST_CASE("ODE residual drops about 4x per grid halving") {
  const double r1 = solve_scattering(RadialPotential::soft_sphere(1, 2), 8, 1025).residual;
  const double r2 = solve_scattering(RadialPotential::soft_sphere(1, 2), 8, 2049).residual;
  CHECK(r2 < r1 / 2);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("tabulated potential reproduces the analytic family") {
  std::vector<double> r, v;
  for (int j = 0; j <= 400; ++j) {
    r.push_back(j * 0.005);
    v.push_back(r.back() <= 1.0 ? 2.0 : 0.0);
  }
  const RadialPotential t = RadialPotential::tabulated(r, v);
  const ScatteringSolution s = solve_scattering(t, 8, 2049);
  CHECK(s.a0 == doctest::Approx(1 - std::tanh(1.0)).epsilon(1e-2));
}

TEST_CASE("scattering preconditions") {
  CHECK_THROWS_AS(solve_scattering(RadialPotential::soft_sphere(1, 2), 8, 100), Error);
  CHECK_THROWS_AS(solve_scattering(RadialPotential::soft_sphere(1, 2), 3, 1024), Error);
  try {
    RadialPotential::tabulated({0, 1}, {1, INFINITY});
    FAIL("expected NonIntegrablePotential");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonIntegrablePotential);
  }
  const auto s = soft_sphere_solution();
  try {
    scattering_length_variational(RadialPotential::soft_sphere(2, 2), *s);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}

TEST_CASE("cutoff profiles meet the smoothness constraints") {
  for (CutoffProfile p : {CutoffProfile::Smoothstep, CutoffProfile::Cosine}) {
    CHECK(cutoff(p, 0.3).value == 1.0);
    CHECK(cutoff(p, 0.5).value == doctest::Approx(1.0));
    CHECK(cutoff(p, 1.0).value == doctest::Approx(0.0));
    CHECK(cutoff(p, 1.2).value == 0.0);
    CHECK(cutoff(p, 0.5).d1 == doctest::Approx(0.0));
    CHECK(cutoff(p, 1.0).d1 == doctest::Approx(0.0));
    // Finite-difference check of the analytic derivatives.
    const double t = 0.71, h = 1e-5;
    CHECK(cutoff(p, t).d1 == doctest::Approx((cutoff(p, t + h).value - cutoff(p, t - h).value) / (2 * h)).epsilon(1e-7));
    CHECK(cutoff(p, t).d2 == doctest::Approx((cutoff(p, t + h).d1 - cutoff(p, t - h).d1) / (2 * h)).epsilon(1e-6));
  }
  CHECK(parse_profile("cosine") == CutoffProfile::Cosine);
  CHECK_THROWS_AS(parse_profile("gaussian"), Error);
}

TEST_CASE("truncation identity: integral of N^3 eps equals 8 pi a0 for both profiles") {
  const auto s = soft_sphere_solution();
  for (double N : {64.0, 256.0, 1000.0})
    for (double ell : {0.5, 0.125, 0.0625})
      for (CutoffProfile p : {CutoffProfile::Smoothstep, CutoffProfile::Cosine}) {
        const TruncatedScattering t(s, ell, N, p);
        CHECK(std::abs(t.integral_eps_scaled() - 8 * kPi * s->a0) / (8 * kPi * s->a0) < 1e-5);
      }
}

TEST_CASE("truncated functions vanish where they must") {
  const auto s = soft_sphere_solution();
  const TruncatedScattering t(s, 0.25, 100, CutoffProfile::Smoothstep);
  for (double r : {0.001, 0.05, 0.12, 0.1249}) CHECK(t.eps(r) == 0.0);
  for (double r : {0.25, 0.3, 1.0}) {
    CHECK(t.eps(r) == 0.0);
    CHECK(t.omega(r) == 0.0);
  }
  CHECK(t.eps(0.2) != 0.0);
  CHECK(t.omega(0.1) == doctest::Approx(s->omega_at(10.0)));

  const auto z = std::make_shared<ScatteringSolution>(solve_scattering(RadialPotential::zero(), 8, 1024));
  const TruncatedScattering tz(z, 0.25, 100, CutoffProfile::Smoothstep);
  for (double r : {0.01, 0.1, 0.2}) {
    CHECK(tz.omega(r) == 0.0);
    CHECK(tz.eps(r) == 0.0);
  }
  CHECK(tz.integral_eps_scaled() == 0.0);
}

TEST_CASE("truncation preconditions") {
  const auto s = soft_sphere_solution();
  try {
    TruncatedScattering(s, 0.02, 100, CutoffProfile::Smoothstep);
    FAIL("expected CutoffTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CutoffTooSmall);
  }
  CHECK_THROWS_AS(TruncatedScattering(s, 1.5, 100, CutoffProfile::Smoothstep), Error);
  try {
    TruncatedScattering(s, 0.5, 100, CutoffProfile::Smoothstep, 8);
    FAIL("expected UnderresolvedGrid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnderresolvedGrid);
  }
}

TEST_CASE("norm scalings of the truncated scattering solution") {
  const auto s = soft_sphere_solution();
  const ScalingReport r = truncation_scaling_report(s, {64, 128, 256, 512, 1024}, {0.5, 0.25, 0.125, 0.0625});
  REQUIRE(r.exponents.size() == 4);
  const double expected[4][2] = {{-1, 2}, {-1, 0.5}, {-1, 1}, {-0.5, 0}};
  for (int k = 0; k < 4; ++k) {
    REQUIRE(r.exponents[k].N_exponent);
    CHECK(std::abs(*r.exponents[k].N_exponent - expected[k][0]) <= 0.15);
    CHECK(std::abs(*r.exponents[k].ell_exponent - expected[k][1]) <= 0.15);
  }
  CHECK(r.pass);

  // Doubling N halves the L1 norm; doubling ell quadruples it.
  const double a = TruncatedScattering(s, 0.25, 256, CutoffProfile::Smoothstep).norms().l1;
  const double b = TruncatedScattering(s, 0.25, 512, CutoffProfile::Smoothstep).norms().l1;
  const double c = TruncatedScattering(s, 0.5, 256, CutoffProfile::Smoothstep).norms().l1;
  CHECK(a / b == doctest::Approx(2.0).epsilon(0.15));
  CHECK(c / a == doctest::Approx(4.0).epsilon(0.15));

  // Pointwise bound N³|ε| ≤ C ℓ⁻³ with a stable constant.
  double lo = 1e300, hi = 0;
  for (const auto& row : r.rows) {
    lo = std::min(lo, row.pointwise_constant);
    hi = std::max(hi, row.pointwise_constant);
  }
  CHECK(hi / lo < 1.2);
}

TEST_CASE("scaling report edge cases") {
  const auto z = std::make_shared<ScatteringSolution>(solve_scattering(RadialPotential::zero(), 8, 1024));
  const ScalingReport r = truncation_scaling_report(z, {64, 128, 256}, {0.5, 0.25, 0.125});
  for (const auto& e : r.exponents) {
    CHECK_FALSE(e.N_exponent.has_value());
    CHECK_FALSE(e.ell_exponent.has_value());
  }
  for (const auto& row : r.rows) CHECK(row.norms.l1 == 0.0);
  try {
    truncation_scaling_report(soft_sphere_solution(), {64, 128}, {0.5, 0.25, 0.125});
    FAIL("expected InsufficientSamplePoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamplePoints);
  }
}
