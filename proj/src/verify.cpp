#include "bogo/fock.hpp"
#include "bogo/numerics.hpp"
#include "bogo/pipeline.hpp"
#include "bogo/spectrum.hpp"
#include "pipeline_detail.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bogo {

using namespace detail;

namespace {

// Portable uniform draws so reports match across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2 * uniform() - 1; }

 private:
  std::mt19937_64 g_;
};

Eigen::MatrixXd random_symmetric(Rng& rng, int m) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = rng.symmetric();
  return symmetrize(a);
}

// Admissible pair: D = AAᵀ + m·I, ‖K‖ = scale · min spec D.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_pair(Rng& rng, int m, double scale) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = rng.symmetric();
  const Eigen::MatrixXd D = symmetrize(a * a.transpose() + m * Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd K = random_symmetric(rng, m);
  const double dmin = SymmetricEigen(D).values(0);
  const double kn = SymmetricEigen(K).values.cwiseAbs().maxCoeff();
  K = (scale == 0 || kn == 0) ? Eigen::MatrixXd::Zero(m, m) : Eigen::MatrixXd(K * (scale * dmin / kn));
  return {D, K};
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_vec(Eigen::VectorXd(m.row(i).transpose())));
  return rows;
}

long count_below(const std::vector<double>& e, std::size_t i, double remaining) {
  if (i == e.size()) return 1;
  long n = 0;
  for (double used = 0; used <= remaining + kLevelMergeTolerance; used += e[i]) n += count_below(e, i + 1, remaining - used);
  return n;
}

double abs_sum(const SparseMatrix& A) { return Eigen::MatrixXd(A).cwiseAbs().sum(); }

}  // namespace

RunReport cmd_verify(const RunConfig& c) {
  RunReport rep;
  rep.command = "verify";
  rep.config = to_json(c);
  double max_symplectic = 0;
  bool traces_ok = true;
  try {
    std::shared_ptr<const ScatteringSolution> sol;
    run_stage(rep, "scattering_triple", [&](StageResult& s) {
      sol = solve_from_config(c);
      const ScatteringSummary sum = summarize_scattering(*sol);
      s.data = {{"a0_fit", sum.a0_fit}, {"a0_variational", sum.a0_variational}, {"a0_integral", sum.a0_integral},
                {"max_rel_spread", sum.max_rel_spread}};
      if (sum.closed_form) s.data["a0_closed_form"] = *sum.closed_form;
      s.verdict = verdict(sum.pass);
    });
    const double a0 = sol->a0;
    const bool interacting = !sol->potential.is_zero();

    run_stage(rep, "truncation_identity", [&](StageResult& s) {
      const IdentitySummary id = truncation_identity(sol, c.truncation.N_list, c.truncation.ell_list, c.truncation.points_per_piece);
      s.data = {{"max_rel_deviation", id.max_rel_deviation}, {"max_profile_gap", id.max_profile_gap}, {"cases", id.rows.size()}};
      s.verdict = verdict(id.pass);
    });

    run_stage(rep, "truncation_scaling", [&](StageResult& s) {
      if (!interacting) {
        s.verdict = Verdict::Skipped;
        s.data["reason"] = "norms vanish identically";
        return;
      }
      const ScalingReport sr = truncation_scaling_report(sol, c.truncation.N_list, c.truncation.ell_list, make_profile(c),
                                                         c.truncation.scaling_tolerance);
      Json ex = Json::array();
      for (const auto& e : sr.exponents)
        ex.push_back({{"norm", e.name}, {"N_exponent", e.N_exponent.value_or(NAN)}, {"ell_exponent", e.ell_exponent.value_or(NAN)}});
      s.data["exponents"] = ex;
      s.verdict = verdict(sr.pass);
    });

    run_stage(rep, "torus_dispersion", [&](StageResult& s) {
      const GPState st = torus_state(a0);
      auto basis = std::make_shared<const Basis>(Basis::torus(3 * 2 * kPi));
      const OperatorMatrix D = assemble_D(basis, st), K = assemble_K_limit(basis, st);
      const BogoliubovDiagonalization d = build_E(D, K);
      max_symplectic = std::max(max_symplectic, d.symplectic_defect);
      traces_ok = traces_ok && d.trace_nonnegative;
      std::vector<double> exact;
      for (const auto& p : basis->momenta()) {
        const double p2 = p.squaredNorm();
        exact.push_back(std::sqrt(p2 * p2 + 16 * kPi * a0 * p2));
      }
      std::sort(exact.begin(), exact.end());
      double dev = 0;
      for (std::size_t i = 0; i < exact.size(); ++i)
        dev = std::max(dev, std::abs(d.eigenvalues(static_cast<Eigen::Index>(i)) - exact[i]) / exact[i]);
      s.data = {{"modes", exact.size()}, {"max_rel_deviation", dev}, {"lowest", exact.front()}};
      s.verdict = verdict(dev <= 1e-10);
    });

    run_stage(rep, "harmonic_linear", [&](StageResult& s) {
      const GPState st = minimize_gp(ExternalPotential::harmonic(1.0), 0.0, RadialGrid{6.5, 400});
      SpectrumSpec spec;
      spec.channels = {0, 1, 2};
      const OneBody ob = one_body(st, nullptr, spec, false);
      max_symplectic = std::max(max_symplectic, ob.symplectic_defect);
      traces_ok = traces_ok && ob.trace_nonnegative;
      const double tol = 1e-4;
      bool lowest_ok = ob.e_inf.size() > 3 && std::abs(ob.e_inf(3) - 2) > tol;
      for (int i = 0; i < 3; ++i) lowest_ok = lowest_ok && std::abs(ob.e_inf(i) - 2) <= tol;
      // Group the many-body levels into bands of width tol around 2ωK.
      const SpectrumReport r = excitation_spectrum(ob.e_inf, 4 + tol);
      std::vector<long> bands(3, 0);
      bool banded = true;
      for (const auto& l : r.levels) {
        const long K = std::lround(l.value / 2);
        banded = banded && K <= 2 && std::abs(l.value - 2.0 * K) <= 2 * tol;
        if (K <= 2) bands[K] += l.multiplicity;
      }
      const std::vector<long> oracle = harmonic_level_counts(2);
      s.data = {{"lowest", to_json_vec(Eigen::VectorXd(ob.e_inf.head(4)))},
                {"band_counts", bands},
                {"oscillator_counts", oracle}};
      s.verdict = verdict(lowest_ok && banded && bands == oracle);
    });

    run_stage(rep, "trap_diagonalization", [&](StageResult& s) {
      const GPState st = minimize_gp(ExternalPotential::harmonic(1.0), a0, RadialGrid{6.5, 400});
      SpectrumSpec spec;
      spec.channels = {0, 1, 2};
      std::optional<TruncatedScattering> tr;
      if (interacting) tr.emplace(sol, 0.5, 1000.0, make_profile(c), c.truncation.points_per_piece);
      const OneBody ob = one_body(st, tr ? &*tr : nullptr, spec, true);
      max_symplectic = std::max(max_symplectic, ob.symplectic_defect);
      traces_ok = traces_ok && ob.trace_nonnegative;
      s.data = {{"mu", st.mu},
                {"symplectic_defect", ob.symplectic_defect},
                {"polar_reconstruction_defect", ob.polar_defect},
                {"root_defect", ob.root_defect},
                {"trace_constant_inf", ob.traces_inf.trace_constant}};
      if (tr) s.data["trace_constant"] = ob.traces.trace_constant;
      s.verdict = verdict(ob.symplectic_defect < 1e-9 && ob.polar_defect < 1e-8 && ob.root_defect < 1e-10);
    });

    run_stage(rep, "fock_structure", [&](StageResult& s) {
      const FockSpace space(3, 6);
      const LadderOperators L = build_ladder(space);
      const Eigen::Index low = static_cast<Eigen::Index>(space.sector_end(5));
      double ccr = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const Eigen::MatrixXd comm = Eigen::MatrixXd(L.annihilate[i] * L.create[j] - L.create[j] * L.annihilate[i]);
          Eigen::MatrixXd blk = comm.topLeftCorner(low, low);
          if (i == j) blk -= Eigen::MatrixXd::Identity(low, low);
          ccr = std::max(ccr, blk.cwiseAbs().maxCoeff());
        }
      Rng rng(c.seed ^ 0x5eedULL);
      const Eigen::MatrixXd A = random_symmetric(rng, 3), B = random_symmetric(rng, 3);
      const double additivity =
          abs_sum(second_quantize(space, A + B) - second_quantize(space, A) - second_quantize(space, B));
      const SparseMatrix dA = second_quantize(space, A);
      double off_sector = 0;
      for (int k = 0; k < dA.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(dA, k); it; ++it)
          if (space.total(static_cast<std::size_t>(it.row())) != space.total(static_cast<std::size_t>(it.col())))
            off_sector = std::max(off_sector, std::abs(it.value()));
      const double number =
          abs_sum(second_quantize(space, Eigen::MatrixXd::Identity(3, 3)) - number_operator(space));
      const SparseMatrix H0 = QuadraticHamiltonian{A + 4 * Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 3)}.assemble(space);
      const SparseMatrix Nn = number_operator(space);
      const double commutator = abs_sum(H0 * Nn - Nn * H0);
      s.data = {{"ccr_defect", ccr}, {"additivity_defect", additivity}, {"off_sector", off_sector},
                {"number_defect", number}, {"unpaired_commutator", commutator}};
      s.verdict = verdict(ccr <= 1e-12 && additivity <= 1e-12 && off_sector == 0 && number <= 1e-12 && commutator <= 1e-11);
    });

    run_stage(rep, "fock_identity", [&](StageResult& s) {
      IdentityOptions o;
      o.throw_on_growth = false;
      o.mutate_pairing_sign = c.verify.mutate_pairing_sign;
      Rng rng(c.seed);
      struct Case {
        Eigen::MatrixXd D, K;
        std::vector<int> n_max;
      };
      std::vector<Case> cases;
      Eigen::MatrixXd K1 = c.fock.K;
      if (c.verify.pairing_scale == 0) K1.setZero();
      if (c.fock.D.rows() == 1) cases.push_back({c.fock.D, K1, {10, 20, 30, 40}});
      for (int k = 0; k < c.verify.random_cases; ++k) {
        auto [D2, K2] = random_pair(rng, 2, c.verify.pairing_scale);
        cases.push_back({D2, K2, {8, 12, 16, 20}});
        auto [D3, K3] = random_pair(rng, 3, c.verify.pairing_scale);
        cases.push_back({D3, K3, {6, 8, 10, 12}});
      }
      Json rows = Json::array();
      bool ok = true;
      for (const auto& cs : cases) {
        const IdentityReport r = verify_bogoliubov_identity(cs.D, cs.K, cs.n_max, o);
        Json dev = Json::array();
        for (const auto& x : r.rows) dev.push_back(x.max_deviation);
        rows.push_back({{"modes", cs.D.rows()}, {"D", matrix_json(cs.D)}, {"K", matrix_json(cs.K)},
                        {"n_max", cs.n_max}, {"deviation", dev}, {"monotone", r.monotone}, {"pass", r.pass()}});
        ok = ok && r.pass();
        const BogoliubovCore core = bogoliubov_core(cs.D, cs.K);
        max_symplectic = std::max(max_symplectic, diagonalizing_pair(cs.D, core.E).symplectic_defect);
      }
      s.data["cases"] = rows;
      s.verdict = verdict(ok);
    });

    run_stage(rep, "unitary", [&](StageResult& s) {
      Rng rng(c.seed ^ 0xb0b0ULL);
      Eigen::MatrixXd k2 = random_symmetric(rng, 2);
      k2 *= 0.3 / SymmetricEigen(k2).values.cwiseAbs().maxCoeff();
      struct Case {
        Eigen::MatrixXd k;
        int n_max, low;
      };
      const std::vector<Case> cases = {{Eigen::MatrixXd::Constant(1, 1, 0.3), 60, 10}, {k2, 40, 4}};
      Json rows = Json::array();
      bool ok = true;
      for (const auto& cs : cases) {
        const FockSpace space(static_cast<int>(cs.k.rows()), cs.n_max);
        const UnitaryReport u = bogoliubov_unitary(space, cs.k, cs.low);
        rows.push_back({{"modes", cs.k.rows()}, {"n_max", cs.n_max}, {"low_sector", cs.low}, {"leak", u.leak},
                        {"action_defect", u.action_defect}, {"orthogonality_defect", u.orthogonality_defect},
                        {"moment_ratio", u.moment_ratio}});
        ok = ok && u.action_defect < 1e-6 && u.orthogonality_defect < 1e-8 && std::isfinite(u.moment_ratio);
      }
      s.data["cases"] = rows;
      s.verdict = verdict(ok);
    });

    run_stage(rep, "spectrum_invariants", [&](StageResult& s) {
      Rng rng(c.seed ^ 0x5bec7ULL);
      bool ok = true;
      for (int t = 0; t < 20; ++t) {
        const int m = 1 + static_cast<int>(rng.uniform() * 4);
        Eigen::VectorXd e(m);
        for (int i = 0; i < m; ++i) e(i) = 0.5 + 2 * rng.uniform();
        const double cap = 1 + 5 * rng.uniform();
        const SpectrumReport r = excitation_spectrum(e, cap);
        std::vector<double> es(e.data(), e.data() + m);
        std::sort(es.begin(), es.end());
        ok = ok && r.total_states() == count_below(es, 0, cap);
        Eigen::VectorXd rev = e.reverse();
        const SpectrumReport rp = excitation_spectrum(rev, cap);
        ok = ok && rp.levels.size() == r.levels.size();
        for (std::size_t i = 0; ok && i < r.levels.size(); ++i)
          ok = r.levels[i].value == rp.levels[i].value && r.levels[i].multiplicity == rp.levels[i].multiplicity &&
               r.levels[i].witness == rp.levels[i].witness;
        const SpectrumReport big = excitation_spectrum(e, cap + 1);
        for (std::size_t i = 0; ok && i < r.levels.size(); ++i)
          ok = big.levels[i].value == r.levels[i].value && big.levels[i].multiplicity == r.levels[i].multiplicity;
        // Closure under adding one quantum.
        for (const auto& l : r.levels)
          for (double ei : es) {
            if (l.value + ei > cap) continue;
            bool found = false;
            for (const auto& l2 : r.levels) found = found || std::abs(l2.value - (l.value + ei)) <= kLevelMergeTolerance;
            ok = ok && found;
          }
        ok = ok && r.levels.front().value == 0 && r.levels.front().multiplicity == 1;
      }
      const SpectrumReport ex = excitation_spectrum(Eigen::Vector2d(2, 3), 7);
      std::vector<long> mult;
      for (const auto& l : ex.levels) mult.push_back(l.multiplicity);
      ok = ok && mult == std::vector<long>{1, 1, 1, 1, 1, 2, 1};
      s.data = {{"random_cases", 20}, {"example_multiplicities", mult}};
      s.verdict = verdict(ok);
    });

    auto ell_rate = [&](StageResult& s, const GPState& st, const SpectrumSpec& spec, const std::vector<double>& ells) {
      if (!interacting) {
        // K = K∞ = 0 and every gap vanishes.
        s.data["reason"] = "no interaction; gaps vanish";
      }
      const SweepOperators ops(st, spec);
      std::vector<Eigen::VectorXd> ev;
      for (double ell : ells) ev.push_back(ops.eigenvalues(TruncatedScattering(sol, ell, spec.N, make_profile(c), c.truncation.points_per_piece)));
      const ConvergenceTable t = convergence_table(ells, ev, ops.limit(), 5);
      Json ratios = Json::array();
      for (const auto& r : t.halving_ratios) ratios.push_back(to_json_vec(r));
      s.data["ell"] = t.ell;
      s.data["halving_ratios"] = ratios;
      s.data["exponents"] = to_json_vec(t.exponents);
      s.verdict = verdict(t.ratio_pass && t.exponent_pass);
    };

    run_stage(rep, "ell_rate_torus", [&](StageResult& s) {
      SpectrumSpec spec;
      spec.N = 1000;
      ell_rate(s, torus_state(a0), spec, {0.25, 0.125, 0.0625});
    });

    if (c.verify.include_trap_sweep) {
      run_stage(rep, "ell_rate_trap", [&](StageResult& s) {
        const GPState st = minimize_gp(ExternalPotential::harmonic(1.0), a0, RadialGrid{6.5, 1040});
        SpectrumSpec spec;
        spec.N = 1000;
        spec.channels = {0, 1, 2};
        ell_rate(s, st, spec, {0.5, 0.25, 0.125});
      });
    }

    run_stage(rep, "dilute_rate", [&](StageResult& s) {
      if (!interacting) {
        s.verdict = Verdict::Skipped;
        s.data["reason"] = "no interaction";
        return;
      }
      const GPState st = minimize_gp(ExternalPotential::harmonic(1.0), a0, RadialGrid{6.5, 1700});
      const DiluteReport d = dilute_limit_check(*sol, st, {32, 64, 128, 256});
      Json rows = Json::array();
      for (const auto& r : d.rows) rows.push_back({{"N", r.N}, {"deviation", r.deviation}});
      s.data["rows"] = rows;
      s.data["exponent"] = d.exponent.value_or(NAN);
      s.verdict = verdict(d.pass);
    });

    run_stage(rep, "trace_regularization", [&](StageResult& s) {
      const TruncatedScattering tr(sol, 0.5, 1000.0, make_profile(c), c.truncation.points_per_piece);
      Json rows = Json::array();
      std::vector<double> combo;
      bool ok = traces_ok;
      for (int n : {5, 10}) {
        const TorusBogoliubov t = torus_bogoliubov(2 * kPi * n, [&](double p) { return eps_hat(tr, p); });
        const double v = t.traces.trace_constant + t.traces.regularized_trace;
        combo.push_back(v);
        ok = ok && t.traces.raw_trace >= -1e-9 * static_cast<double>(t.modes);
        rows.push_back({{"cutoff_index", n}, {"modes", t.modes}, {"raw_trace", t.traces.raw_trace},
                        {"trace_constant", t.traces.trace_constant}, {"regularized_trace", t.traces.regularized_trace},
                        {"combination", v},
                        {"cancelling_combination", 2 * t.traces.trace_constant + t.traces.regularized_trace}});
      }
      const double drift = combo[1] == 0 ? std::abs(combo[0]) : std::abs(combo[1] - combo[0]) / std::abs(combo[1]);
      s.data["rows"] = rows;
      s.data["relative_drift"] = drift;
      s.data["traces_nonnegative_elsewhere"] = traces_ok;
      s.verdict = verdict(ok && drift < 0.1);
    });

    run_stage(rep, "symplectic", [&](StageResult& s) {
      s.data["max_defect"] = max_symplectic;
      s.verdict = verdict(max_symplectic < 1e-9);
    });
  } catch (const StageAbort&) {
  }
  return rep;
}

}  // namespace bogo
