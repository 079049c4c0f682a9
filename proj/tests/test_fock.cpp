#include "bogo/bogoliubov.hpp"
#include "bogo/error.hpp"
#include "bogo/fock.hpp"
#include "bogo/numerics.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace bogo;

namespace {

long binomial(int n, int k) {
  long r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

Eigen::MatrixXd dense(const SparseMatrix& a) { return Eigen::MatrixXd(a); }

// Lowest sums Σ n_i e_i − ½Tr(D+K−E) by brute enumeration of occupations.
std::vector<double> reference_levels(const Eigen::VectorXd& e, double constant, int n_max, std::size_t count) {
  const FockSpace s(static_cast<int>(e.size()), n_max);
  std::vector<double> v;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    double x = constant;
    for (int j = 0; j < s.modes(); ++j) x += s.state(i)[j] * e(j);
    v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  v.resize(count);
  return v;
}

}  // namespace

TEST_CASE("Fock space dimension and index bijection") {
  for (int m = 1; m <= 4; ++m)
    for (int n : {0, 1, 3, 6}) {
      const FockSpace s(m, n);
      CHECK(s.dimension() == static_cast<std::size_t>(binomial(n + m, m)));
      CHECK(s.dimension() == FockSpace::binomial_dimension(m, n));
      for (std::size_t i = 0; i < s.dimension(); ++i) {
        CHECK(s.index(s.state(i)) == i);
        if (i) CHECK(s.total(i) >= s.total(i - 1));
      }
      for (int k = 0; k <= n; ++k) CHECK(s.sector_end(k) == static_cast<std::size_t>(binomial(k + m, m)));
    }
  const FockSpace s(2, 2);
  CHECK(s.state(0) == std::vector<int>{0, 0});
  CHECK(s.state(1) == std::vector<int>{1, 0});
  CHECK(s.state(2) == std::vector<int>{0, 1});
  CHECK(s.state(3) == std::vector<int>{2, 0});
  CHECK_FALSE(s.contains({2, 1}));
  CHECK_THROWS_AS(s.index({3, 0}), Error);
  CHECK_THROWS_AS(FockSpace(9, 2), Error);
}

TEST_CASE("ladder matrices for one mode") {
  const FockSpace s(1, 2);
  const LadderOperators l = build_ladder(s);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected(1, 0) = 1;
  expected(2, 1) = std::sqrt(2.0);
  CHECK(max_abs(dense(l.create[0]) - expected) < 1e-15);
  CHECK(max_abs(dense(l.annihilate[0]) - expected.transpose()) < 1e-15);
}

TEST_CASE("canonical commutation relations below the truncation edge") {
  const FockSpace s(3, 6);
  const LadderOperators l = build_ladder(s);
  const std::size_t low = s.sector_end(5);  // [a, a†] = 1 fails only on the top sector
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Eigen::MatrixXd c = dense(l.annihilate[i] * l.create[j] - l.create[j] * l.annihilate[i]);
      const Eigen::MatrixXd id = (i == j ? 1.0 : 0.0) * Eigen::MatrixXd::Identity(low, low);
      CHECK(max_abs(c.topLeftCorner(low, low) - id) < 1e-12);
      CHECK(max_abs(dense(l.annihilate[i] * l.annihilate[j] - l.annihilate[j] * l.annihilate[i])) < 1e-12);
    }
}

TEST_CASE("number operator and second quantization of the identity") {
  const FockSpace s(3, 4);
  const SparseMatrix N = number_operator(s);
  for (std::size_t i = 0; i < s.dimension(); ++i) CHECK(N.coeff(i, i) == s.total(i));
  CHECK(max_abs(dense(N) - dense(N).diagonal().asDiagonal().toDenseMatrix()) == 0.0);
  CHECK(max_abs(dense(second_quantize(s, Eigen::MatrixXd::Identity(3, 3))) - dense(N)) < 1e-14);
}

TEST_CASE("diagonal one-body operator: sector spectra by exhaustion") {
  Eigen::MatrixXd D = Eigen::Vector3d(1.0, 1.7, 2.9).asDiagonal();
  const FockSpace s(3, 3);
  const Eigen::MatrixXd H = dense(second_quantize(s, D));
  for (int k = 0; k <= 3; ++k) {
    std::vector<double> expect, got;
    for (int a = 0; a <= k; ++a)
      for (int b = 0; a + b <= k; ++b) expect.push_back(a * 1.0 + b * 1.7 + (k - a - b) * 2.9);
    const std::size_t lo = k ? s.sector_end(k - 1) : 0, hi = s.sector_end(k);
    const Eigen::MatrixXd block = H.block(lo, lo, hi - lo, hi - lo);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues();
    got.assign(ev.data(), ev.data() + ev.size());
    std::sort(expect.begin(), expect.end());
    REQUIRE(got.size() == expect.size());
    for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(expect[j]).epsilon(1e-12));
    CHECK(got.front() == doctest::Approx(k * 1.0));
  }
}

TEST_CASE("brute force without pairing is the free spectrum") {
  Eigen::MatrixXd D = Eigen::Vector2d(1.0, 1.5).asDiagonal();
  const FockSpace s(2, 6);
  const Eigen::VectorXd ev = brute_force_spectrum(s, {D, Eigen::MatrixXd::Zero(2, 2)}, 6);
  const double expect[6] = {0, 1, 1.5, 2, 2.5, 3};
  for (int j = 0; j < 6; ++j) CHECK(ev(j) == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("one mode: ground energy and gap converge monotonically") {
  Eigen::MatrixXd D(1, 1), K(1, 1);
  D << 1.0;
  K << 0.3;
  double prev = 1e300;
  for (int n : {10, 20, 30, 40}) {
    const Eigen::VectorXd ev = brute_force_spectrum(FockSpace(1, n), {D, K}, 2);
    CHECK(ev(0) <= prev + 1e-12);
    prev = ev(0);
    if (n == 40) {
      CHECK(ev(0) == doctest::Approx(-0.5 * (1.3 - std::sqrt(1.6))).epsilon(1e-10));
      CHECK(ev(1) - ev(0) == doctest::Approx(std::sqrt(1.6)).epsilon(1e-10));
    }
  }
  CHECK(prev == doctest::Approx(-0.0175445).epsilon(1e-5));
}

TEST_CASE("two modes with swap pairing") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(2, 2), K(2, 2);
  K << 0, 0.2, 0.2, 0;
  const BogoliubovCore c = bogoliubov_core(D, K);
  const double tc = ground_energy_constant(D, K, c.E).trace_constant;
  const Eigen::VectorXd ev = brute_force_spectrum(FockSpace(2, 30), {D, K}, 6);
  const std::vector<double> ref = reference_levels(c.eigenvalues, tc, 6, 6);
  for (int j = 0; j < 6; ++j) CHECK(std::abs(ev(j) - ref[j]) < 1e-6);
}

TEST_CASE("identity check: free case is exact") {
  Eigen::MatrixXd D = Eigen::Vector2d(1.0, 1.3).asDiagonal();
  const IdentityReport r = verify_bogoliubov_identity(D, Eigen::MatrixXd::Zero(2, 2), {6, 10});
  for (const auto& row : r.rows) CHECK(row.max_deviation < 1e-12);
  CHECK(r.pass());
  CHECK(r.trace_constant == 0.0);
}

TEST_CASE("identity check converges for one and three modes") {
  Eigen::MatrixXd D(1, 1), K(1, 1);
  D << 1.0;
  K << 0.3;
  const IdentityReport one = verify_bogoliubov_identity(D, K, {10, 20, 30, 40});
  CHECK(one.pass());
  CHECK(one.rows.back().max_deviation < 1e-8);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(3, 3), B(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      A(i, j) = g(rng);
      B(i, j) = g(rng);
    }
  const Eigen::MatrixXd D3 = A * A.transpose() / 3 + Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd K3 = 0.1 * symmetrize(B);
  IdentityOptions o;
  o.levels = 6;
  const IdentityReport three = verify_bogoliubov_identity(D3, K3, {6, 9, 12}, o);
  CHECK(three.monotone);
  CHECK(three.rows.back().max_deviation < 1e-6);
  CHECK(three.reference.size() == 6);
}

TEST_CASE("a sign-flipped pairing term is caught") {
  Eigen::MatrixXd D(1, 1), K(1, 1);
  D << 1.0;
  K << 0.3;
  IdentityOptions o;
  o.mutate_pairing_sign = true;
  try {
    verify_bogoliubov_identity(D, K, {10, 20, 30}, o);
    FAIL("expected NonConvergentTruncation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergentTruncation);
  }
  o.throw_on_growth = false;
  const IdentityReport r = verify_bogoliubov_identity(D, K, {10, 20, 30}, o);
  CHECK_FALSE(r.pass());
}

TEST_CASE("unitary implementation of the Bogoliubov map") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  const UnitaryReport id = bogoliubov_unitary(FockSpace(1, 20), zero, 5);
  CHECK(max_abs(id.T - Eigen::MatrixXd::Identity(21, 21)) < 1e-14);

  Eigen::MatrixXd k(1, 1);
  k << 0.2;
  try {
    bogoliubov_unitary(FockSpace(1, 30), k, 10);
    FAIL("expected TruncationLeak");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationLeak);
  }
  const UnitaryReport r = bogoliubov_unitary(FockSpace(1, 40), k, 10);
  CHECK(r.action_defect < 1e-6);
  CHECK(r.orthogonality_defect < 1e-6);
  // Squeezed vacuum: ⟨2n|T|0⟩ = tanh(r)^n √((2n)!) / (2^n n! √cosh r).
  const double rr = 0.2;
  for (int n = 0; n <= 8; ++n) {
    const double amp = std::pow(std::tanh(rr), n) * std::sqrt(std::tgamma(2 * n + 1.0)) /
                       (std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::cosh(rr)));
    CHECK(r.T(2 * n, 0) == doctest::Approx(amp).epsilon(1e-9));
    CHECK(std::abs(r.T(2 * n + 1, 0)) < 1e-14);
  }
  const UnitaryReport wider = bogoliubov_unitary(FockSpace(1, 60), k, 10);
  CHECK(wider.moment_ratio == doctest::Approx(r.moment_ratio).epsilon(1e-6));
  // Tᵀ(𝒩+1)T = ch(2r)𝒩 + ½ sh(2r)(a†² + a²) + ch²r and |½(a†² + a²)| ≤ 𝒩 + 1.
  CHECK(r.moment_ratio > 1.0);
  CHECK(r.moment_ratio <= std::exp(2 * rr) / (1 + std::pow(std::sinh(rr), 2)) + 1e-9);
}

TEST_CASE("two-mode unitary") {
  Eigen::MatrixXd k(2, 2);
  k << 0.1, 0.15, 0.15, -0.05;
  const UnitaryReport r = bogoliubov_unitary(FockSpace(2, 40), k, 4);
  CHECK(r.action_defect < 1e-6);
  CHECK(r.orthogonality_defect < 1e-6);
}

TEST_CASE("Fock size guards") {
  const FockSpace s(4, 30);
  try {
    build_ladder(s, 1000);
    FAIL("expected DimensionOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionOverflow);
  }
  try {
    brute_force_spectrum(s, {Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 4)}, 2);
    FAIL("expected DimensionOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionOverflow);
  }
}

TEST_CASE("second quantization is additive and conserves particle number") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(3, 3), B(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      A(i, j) = g(rng);
      B(i, j) = g(rng);
    }
  A = symmetrize(A);
  B = symmetrize(B);
  const FockSpace s(3, 5);
  CHECK(max_abs(dense(second_quantize(s, A + B)) - dense(second_quantize(s, A)) - dense(second_quantize(s, B))) <
        1e-12);
  const Eigen::MatrixXd H = dense(second_quantize(s, A)), N = dense(number_operator(s));
  CHECK(max_abs(H * N - N * H) < 1e-12);
  // Block structure: no matrix element between different sectors.
  for (std::size_t i = 0; i < s.dimension(); ++i)
    for (std::size_t j = 0; j < s.dimension(); ++j)
      if (s.total(i) != s.total(j)) CHECK(H(i, j) == 0.0);
  // Pairing changes the particle number by exactly two.
  const Eigen::MatrixXd P = dense(pairing_operator(s, B));
  for (std::size_t i = 0; i < s.dimension(); ++i)
    for (std::size_t j = 0; j < s.dimension(); ++j)
      if (P(i, j) != 0.0) CHECK(std::abs(s.total(i) - s.total(j)) == 2);
}
