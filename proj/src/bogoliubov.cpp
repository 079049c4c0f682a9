#include "bogo/bogoliubov.hpp"

#include "bogo/error.hpp"
#include "bogo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bogo {

namespace {

Eigen::MatrixXd inner_operator(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K, Eigen::MatrixXd* sqrtD_out) {
  require(D.rows() == K.rows() && D.cols() == K.cols() && D.rows() == D.cols(), ErrorCode::GridMismatch,
          "D and K dimensions differ");
  const SymmetricEigen ed(D);
  require(ed.values.size() == 0 || ed.values(0) > 0, ErrorCode::NonPositiveD, "D is not positive definite");
  const Eigen::MatrixXd sqrtD = ed.apply([](double x) { return std::sqrt(x); });
  Eigen::MatrixXd M = symmetrize(sqrtD * symmetrize(D + 2 * K) * sqrtD);
  if (sqrtD_out) *sqrtD_out = sqrtD;
  return M;
}

}  // namespace

BogoliubovCore bogoliubov_core(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K) {
  const Eigen::MatrixXd M = inner_operator(D, K, nullptr);
  const SymmetricEigen em(M);
  require(em.values.size() == 0 || em.values(0) > 0, ErrorCode::IndefiniteInner,
          "D + 2K has a nonpositive eigenvalue (" + std::to_string(em.values.size() ? em.values(0) : 0.0) + ")");
  BogoliubovCore c;
  c.E = em.apply([](double x) { return std::sqrt(x); });
  c.eigenvalues = em.values.cwiseSqrt();
  const double mn = M.norm();
  c.root_defect = mn > 0 ? (c.E * c.E - M).norm() / mn : 0.0;
  return c;
}

Eigen::VectorXd bogoliubov_eigenvalues(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K) {
  const Eigen::MatrixXd M = inner_operator(D, K, nullptr);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::NonConvergence, "eigensolver failed");
  require(es.eigenvalues().size() == 0 || es.eigenvalues()(0) > 0, ErrorCode::IndefiniteInner,
          "D + 2K has a nonpositive eigenvalue");
  return es.eigenvalues().cwiseSqrt();
}

DiagonalizingPair diagonalizing_pair(const Eigen::MatrixXd& D, const Eigen::MatrixXd& E) {
  require(D.rows() == E.rows() && D.cols() == E.cols(), ErrorCode::GridMismatch, "D and E dimensions differ");
  const SymmetricEigen ed(D), ee(E);
  require(ed.values.size() == 0 || ed.values(0) > 0, ErrorCode::NonPositiveD, "D is not positive definite");
  require(ee.values.size() == 0 || ee.values(0) > 0, ErrorCode::SingularE, "E is singular or indefinite");
  const Eigen::MatrixXd Dh = ed.apply([](double x) { return std::sqrt(x); });
  const Eigen::MatrixXd Dmh = ed.apply([](double x) { return 1.0 / std::sqrt(x); });
  const Eigen::MatrixXd Eh = ee.apply([](double x) { return std::sqrt(x); });
  const Eigen::MatrixXd Emh = ee.apply([](double x) { return 1.0 / std::sqrt(x); });
  const Eigen::MatrixXd A = Dh * Emh, B = Dmh * Eh;
  DiagonalizingPair p;
  p.c2 = 0.5 * (A + B);
  p.s2 = 0.5 * (A - B);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(D.rows(), D.cols());
  p.symplectic_defect = max_abs(p.c2.transpose() * p.c2 - p.s2.transpose() * p.s2 - I);
  p.s2_frobenius = p.s2.norm();
  return p;
}

DiagonalizingPair diagonalizing_pair(const OperatorMatrix& D, const OperatorMatrix& E) {
  require_same_basis(D, E);
  return diagonalizing_pair(D.entries, E.entries);
}

PolarDiagnostics polar_diagnostics(const Eigen::MatrixXd& D, const Eigen::MatrixXd& E, const DiagonalizingPair& pair) {
  const SymmetricEigen ed(D), ee(E);
  const Eigen::MatrixXd A =
      ed.apply([](double x) { return std::sqrt(x); }) * ee.apply([](double x) { return 1.0 / std::sqrt(x); });
  const SymmetricEigen ata(A.transpose() * A);
  require(ata.values.size() == 0 || ata.values(0) > 0, ErrorCode::SingularE, "A is singular");
  PolarDiagnostics pd;
  const Eigen::MatrixXd inv_abs = ata.apply([](double x) { return 1.0 / std::sqrt(x); });
  pd.W = A * inv_abs;
  pd.k2 = ata.apply([](double x) { return 0.5 * std::log(x); });
  const SymmetricEigen ek(pd.k2);
  const Eigen::MatrixXd ch = ek.apply([](double x) { return std::cosh(x); });
  const Eigen::MatrixXd sh = ek.apply([](double x) { return std::sinh(x); });
  pd.reconstruction_defect = std::max(max_abs(pd.W * ch - pair.c2), max_abs(pd.W * sh - pair.s2));
  return pd;
}

TraceConstants ground_energy_constant(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K, const Eigen::MatrixXd& E) {
  TraceConstants t;
  t.raw_trace = D.trace() + K.trace() - E.trace();
  t.trace_constant = -0.5 * t.raw_trace;
  if (D.rows() == 0) return t;
  Eigen::LLT<Eigen::MatrixXd> llt(D);
  require(llt.info() == Eigen::Success, ErrorCode::SingularD, "D is singular or indefinite");
  const Eigen::MatrixXd X = llt.solve(K);
  t.regularized_trace = 0.5 * (X.array() * K.transpose().array()).sum();
  return t;
}

TraceConstants ground_energy_constant(const OperatorMatrix& D, const OperatorMatrix& K, const OperatorMatrix& E) {
  require_same_basis(D, K);
  require_same_basis(D, E);
  return ground_energy_constant(D.entries, K.entries, E.entries);
}

BogoliubovDiagonalization build_E(const OperatorMatrix& D, const OperatorMatrix& K, bool with_polar) {
  require_same_basis(D, K);
  BogoliubovCore core = bogoliubov_core(D.entries, K.entries);
  BogoliubovDiagonalization b;
  b.E = OperatorMatrix{D.basis, std::move(core.E), K.label == "K_inf" ? "E_inf" : "E"};
  b.eigenvalues = std::move(core.eigenvalues);
  b.root_defect = core.root_defect;
  DiagonalizingPair pair = diagonalizing_pair(D.entries, b.E.entries);
  b.symplectic_defect = pair.symplectic_defect;
  b.s2_frobenius = pair.s2_frobenius;
  if (with_polar) b.polar = polar_diagnostics(D.entries, b.E.entries, pair);
  b.c2 = std::move(pair.c2);
  b.s2 = std::move(pair.s2);
  const TraceConstants t = ground_energy_constant(D.entries, K.entries, b.E.entries);
  b.trace_constant = t.trace_constant;
  b.regularized_trace = t.regularized_trace;
  b.trace_nonnegative = t.raw_trace >= -1e-9 * static_cast<double>(D.dimension());
  return b;
}

TorusBogoliubov torus_bogoliubov(double p_max, const std::function<double(double)>& k_symbol) {
  TorusBogoliubov out;
  const int m = static_cast<int>(std::floor(p_max / (2 * kPi) + 1e-9));
  const long cap = static_cast<long>(std::floor(std::pow(p_max / (2 * kPi), 2) * (1 + 1e-12)));
  std::vector<long> count(cap + 1, 0);
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j)
      for (int k = -m; k <= m; ++k) {
        const long n2 = long(i) * i + long(j) * j + long(k) * k;
        if (n2 > 0 && n2 <= cap) ++count[n2];
      }
  for (long n2 = 1; n2 <= cap; ++n2) {
    if (!count[n2]) continue;
    TorusShell s;
    s.n2 = n2;
    s.multiplicity = count[n2];
    s.p = 2 * kPi * std::sqrt(static_cast<double>(n2));
    s.d = s.p * s.p;
    s.k = k_symbol(s.p);
    const double inner = s.d * (s.d + 2 * s.k);
    require(inner > 0, ErrorCode::IndefiniteInner, "D + 2K is nonpositive on a torus shell");
    s.e = std::sqrt(inner);
    out.shells.push_back(s);
    out.modes += static_cast<std::size_t>(s.multiplicity);
    out.traces.raw_trace += s.multiplicity * (s.d + s.k - s.e);
    out.traces.regularized_trace += 0.5 * s.multiplicity * s.k * s.k / s.d;
  }
  out.traces.trace_constant = -0.5 * out.traces.raw_trace;
  return out;
}

SecondOrderEnergy second_order_energy(const GPState& state, const TruncatedScattering& trunc, double trace_constant) {
  require(std::abs(state.a0 - trunc.a0()) <= 1e-9 * std::max(1.0, trunc.a0()), ErrorCode::GridMismatch,
          "state and truncation use different scattering lengths");
  SecondOrderEnergy e;
  const double N = trunc.N(), ell = trunc.ell();
  e.N = N;
  e.ell = ell;
  e.gp_term = N * gp_energy(state);
  const ScatteringSolution& sol = trunc.solution();
  if (!sol.potential.is_zero()) {
    const double R0 = sol.potential.support_radius();
    const Eigen::VectorXd vf = convolve_density(
        state, [&](double t) { return N * N * N * sol.potential(N * t) * sol.f_at(N * t); }, 0.0, R0 / N);
    e.scattering_term = -0.5 * integrate_against_density(state, vf);
    const Eigen::VectorXd we = convolve_density(
        state, [&](double t) { return N * trunc.omega(t) * trunc.eps_scaled(t); }, ell / 2, ell);
    e.correlation_term = -0.5 * integrate_against_density(state, we);
  }
  e.trace_term = trace_constant;
  e.total = e.gp_term + e.scattering_term + e.correlation_term + e.trace_term;
  return e;
}

SecondOrderEnergy second_order_energy(const GPState& state, const TruncatedScattering& trunc,
                                      const BogoliubovDiagonalization& diag) {
  return second_order_energy(state, trunc, diag.trace_constant);
}

ConvergenceTable convergence_table(const std::vector<double>& ell, const std::vector<Eigen::VectorXd>& eigenvalues,
                                   const Eigen::VectorXd& limit, int levels) {
  require(ell.size() >= 3 && eigenvalues.size() == ell.size(), ErrorCode::InsufficientEllValues,
          "convergence study needs at least 3 values of ℓ");
  std::vector<std::size_t> order(ell.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ell[a] > ell[b]; });
  ConvergenceTable t;
  for (std::size_t i : order) t.ell.push_back(ell[i]);
  for (std::size_t k = 0; k + 1 < t.ell.size(); ++k)
    require(std::abs(t.ell[k] / t.ell[k + 1] - 2.0) < 1e-9, ErrorCode::InsufficientEllValues,
            "ℓ values must be dyadic");
  int L = levels;
  L = std::min<int>(L, static_cast<int>(limit.size()));
  for (const auto& ev : eigenvalues) L = std::min<int>(L, static_cast<int>(ev.size()));
  t.limit = limit.head(L);
  for (std::size_t i : order) {
    const Eigen::VectorXd v = eigenvalues[i].head(L);
    t.values.push_back(v);
    t.gaps.push_back((v - t.limit).cwiseAbs().cwiseQuotient(v.cwiseAbs()));
  }
  bool vanishing = true;
  for (const auto& g : t.gaps) vanishing = vanishing && g.maxCoeff() <= 1e-15;
  t.exponents = Eigen::VectorXd::Constant(L, std::numeric_limits<double>::quiet_NaN());
  if (vanishing) {
    t.exponent_pass = t.ratio_pass = true;
    return t;
  }
  t.exponent_pass = t.ratio_pass = true;
  for (int lv = 0; lv < L; ++lv) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < t.ell.size(); ++k) {
      x.push_back(std::log(t.ell[k]));
      y.push_back(std::log(t.gaps[k](lv)));
    }
    t.exponents(lv) = fit_slope(x, y);
    t.exponent_pass = t.exponent_pass && t.exponents(lv) >= 1.8;
  }
  for (std::size_t k = 0; k + 1 < t.ell.size(); ++k) {
    const Eigen::VectorXd r = t.gaps[k].cwiseQuotient(t.gaps[k + 1]);
    t.halving_ratios.push_back(r);
    for (int lv = 0; lv < L; ++lv) t.ratio_pass = t.ratio_pass && r(lv) >= 3.0 && r(lv) <= 5.5;
  }
  return t;
}

ConvergenceTable compare_E_to_Einf(const OperatorMatrix& D, const std::vector<double>& ell,
                                   const std::vector<OperatorMatrix>& K_family, const OperatorMatrix& K_limit,
                                   int levels) {
  require(ell.size() == K_family.size(), ErrorCode::InvalidArgument, "one K per ℓ value");
  require(ell.size() >= 3, ErrorCode::InsufficientEllValues, "convergence study needs at least 3 values of ℓ");
  require_same_basis(D, K_limit);
  std::vector<Eigen::VectorXd> ev;
  for (const auto& K : K_family) {
    require_same_basis(D, K);
    ev.push_back(bogoliubov_eigenvalues(D.entries, K.entries));
  }
  return convergence_table(ell, ev, bogoliubov_eigenvalues(D.entries, K_limit.entries), levels);
}

Eigen::VectorXd merge_channels(const std::vector<Eigen::VectorXd>& per_channel, const std::vector<int>& l_values) {
  require(per_channel.size() == l_values.size(), ErrorCode::InvalidArgument, "one l per channel");
  std::vector<double> all;
  for (std::size_t c = 0; c < per_channel.size(); ++c)
    for (Eigen::Index i = 0; i < per_channel[c].size(); ++i)
      for (int m = 0; m < 2 * l_values[c] + 1; ++m) all.push_back(per_channel[c](i));
  std::sort(all.begin(), all.end());
  return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

}  // namespace bogo
