#include "bogo/bogoliubov.hpp"
#include "bogo/error.hpp"
#include "bogo/spectrum.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

using namespace bogo;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(v.size());
  std::size_t j = 0;
  for (double x : v) out(j++) = x;
  return out;
}

// Independent counter: number of occupation vectors with Σ n_i e_i = value,
// by recursion over modes, grouped with the merge tolerance.
std::map<long long, long> count_levels(const Eigen::VectorXd& e, double cap) {
  std::map<long long, long> out;
  std::vector<double> sums{0.0};
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    std::vector<double> next;
    for (double s : sums)
      for (double t = s; t <= cap + 1e-9; t += e(i)) next.push_back(t);
    sums.swap(next);
  }
  for (double s : sums) ++out[std::llround(s * 1e6)];
  return out;
}

}  // namespace

TEST_CASE("two distinct modes below Lambda = 7") {
  const SpectrumReport r = excitation_spectrum(vec({2, 3}), 7.0);
  const double values[7] = {0, 2, 3, 4, 5, 6, 7};
  const long mult[7] = {1, 1, 1, 1, 1, 2, 1};
  REQUIRE(r.levels.size() == 7);
  for (int j = 0; j < 7; ++j) {
    CHECK(r.levels[j].value == doctest::Approx(values[j]));
    CHECK(r.levels[j].multiplicity == mult[j]);
  }
  CHECK(r.total_states() == 8);
  CHECK(r.levels[6].witness == std::vector<int>{2, 1});
  CHECK(r.levels[0].witness == std::vector<int>{0, 0});
  CHECK(witness_string(r.levels[6].witness) == "2,1");
}

TEST_CASE("three degenerate modes below Lambda = 4") {
  const SpectrumReport r = excitation_spectrum(vec({2, 2, 2}), 4.0);
  REQUIRE(r.levels.size() == 3);
  CHECK(r.levels[0].multiplicity == 1);
  CHECK(r.levels[1].multiplicity == 3);
  CHECK(r.levels[2].multiplicity == 6);
  CHECK(r.values_with_multiplicity().size() == 10);
}

TEST_CASE("torus lowest shell is six-fold") {
  const double p2 = 4 * kPi * kPi, e = std::sqrt(p2 * (p2 + 1.6 * kPi));
  const SpectrumReport r = excitation_spectrum(Eigen::VectorXd::Constant(6, e), 50.0);
  REQUIRE(r.levels.size() == 2);
  CHECK(r.levels[1].value == doctest::Approx(41.9164).epsilon(1e-6));
  CHECK(r.levels[1].multiplicity == 6);
}

TEST_CASE("multiplicities agree with an independent counter") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd e(1 + trial % 4);
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = pick(rng) * 0.5;
    const double cap = 4.0;
    const SpectrumReport r = excitation_spectrum(e, cap);
    const auto ref = count_levels(e, cap);
    REQUIRE(r.levels.size() == ref.size());
    std::size_t j = 0;
    for (const auto& [key, m] : ref) {
      CHECK(std::llround(r.levels[j].value * 1e6) == key);
      CHECK(r.levels[j].multiplicity == m);
      ++j;
    }
  }
}

TEST_CASE("spectrum properties") {
  const Eigen::VectorXd e = vec({1.3, 2.1, 0.7, 3.4});
  const SpectrumReport r = excitation_spectrum(e, 6.0);

  // Ordering of the modes does not change the table.
  const SpectrumReport p = excitation_spectrum(vec({3.4, 0.7, 2.1, 1.3}), 6.0);
  REQUIRE(p.levels.size() == r.levels.size());
  for (std::size_t j = 0; j < r.levels.size(); ++j) {
    CHECK(p.levels[j].value == r.levels[j].value);
    CHECK(p.levels[j].multiplicity == r.levels[j].multiplicity);
  }

  // Vacuum appears once; values ascend and stay below the cap.
  CHECK(r.levels[0].value == 0.0);
  CHECK(r.levels[0].multiplicity == 1);
  for (std::size_t j = 1; j < r.levels.size(); ++j) {
    CHECK(r.levels[j].value > r.levels[j - 1].value);
    CHECK(r.levels[j].value <= 6.0 + 1e-12);
  }

  // Raising Λ only appends levels.
  const SpectrumReport big = excitation_spectrum(e, 8.0);
  REQUIRE(big.levels.size() >= r.levels.size());
  for (std::size_t j = 0; j < r.levels.size(); ++j) CHECK(big.levels[j].multiplicity == r.levels[j].multiplicity);

  // Closure: adding a mode energy to a level below Λ − e_i lands on a level.
  for (const auto& lv : r.levels)
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const double t = lv.value + e(i);
      if (t > 6.0) continue;
      CHECK(std::any_of(r.levels.begin(), r.levels.end(),
                        [&](const SpectrumLevel& x) { return std::abs(x.value - t) < 1e-9; }));
    }

  // Witnesses reproduce their level.
  Eigen::VectorXd sorted = e;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  for (const auto& lv : r.levels) {
    double s = 0;
    for (std::size_t i = 0; i < lv.witness.size(); ++i) s += lv.witness[i] * sorted(i);
    CHECK(s == doctest::Approx(lv.value).epsilon(1e-12));
  }
}

TEST_CASE("lowest sums with multiplicity") {
  const std::vector<double> s = lowest_sums(vec({2, 3}), 5);
  CHECK(s == std::vector<double>{0, 2, 3, 4, 5});
  const std::vector<double> t = lowest_sums(vec({2, 2, 2}), 10);
  CHECK(std::count(t.begin(), t.end(), 4.0) == 6);
}

TEST_CASE("spectrum guards") {
  try {
    excitation_spectrum(Eigen::VectorXd::Constant(40, 1.0), 8.0);
    FAIL("expected ExplosionGuard");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExplosionGuard);
  }
  CHECK_THROWS_AS(excitation_spectrum(vec({1, -1}), 3), Error);
  CHECK(excitation_spectrum(vec({5}), 0.0).levels.size() == 1);
}

TEST_CASE("spectrum diffs") {
  const SpectrumReport a = excitation_spectrum(vec({2, 3}), 7.0);
  const SpectrumDiff same = spectrum_diff(a, a);
  CHECK(same.max_abs_gap == 0.0);
  CHECK(same.unmatched == 0);
  CHECK(same.multiplicity_mismatches == 0);

  const SpectrumReport b = excitation_spectrum(vec({2 * 0.9999, 3 * 0.9999}), 7.0);
  const SpectrumDiff d = spectrum_diff(a, b);
  CHECK(d.multiplicity_mismatches == 0);
  CHECK(d.max_abs_gap > 0);
  CHECK(d.max_abs_gap < 0.01);

  try {
    spectrum_diff(a, excitation_spectrum(vec({2, 3}), 6.0));
    FAIL("expected CapMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapMismatch);
  }
}

TEST_CASE("torus E(ell) approaches E_inf like ell squared") {
  const auto sol = std::make_shared<ScatteringSolution>(solve_scattering(RadialPotential::soft_sphere(1, 2), 8, 2049));
  const double g = 8 * kPi * sol->a0;
  const double cap = 2 * 2 * kPi * 2 * kPi;
  const TorusBogoliubov inf = torus_bogoliubov(2 * kPi, [&](double) { return g; });
  Eigen::VectorXd e_inf = Eigen::VectorXd::Constant(6, inf.shells[0].e);
  const SpectrumReport ref = excitation_spectrum(e_inf, cap);
  std::vector<double> gaps;
  for (double ell : {0.25, 0.125, 0.0625}) {
    const TruncatedScattering tr(sol, ell, 1000, CutoffProfile::Smoothstep);
    const TorusBogoliubov t = torus_bogoliubov(2 * kPi, [&](double p) { return eps_hat(tr, p); });
    const SpectrumDiff d = spectrum_diff(excitation_spectrum(Eigen::VectorXd::Constant(6, t.shells[0].e), cap), ref);
    CHECK(d.multiplicity_mismatches == 0);
    gaps.push_back(d.max_rel_gap);
  }
  CHECK(gaps[0] / gaps[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(gaps[1] / gaps[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("spectrum CSV layout") {
  const auto path = std::filesystem::temp_directory_path() / "bogo_test_spectrum.csv";
  write_spectrum_csv(excitation_spectrum(vec({2, 3}), 7.0, "test"), path.string());
  std::ifstream in(path);
  std::string header, first, last, line;
  std::getline(in, header);
  std::getline(in, first);
  while (std::getline(in, line)) last = line;
  CHECK(header == "value,multiplicity,witness");
  CHECK(first == "0,1,\"0,0\"");
  CHECK(last == "7,1,\"2,1\"");
  std::filesystem::remove(path);
}
