#include "bogo/fock.hpp"

#include "bogo/bogoliubov.hpp"
#include "bogo/error.hpp"
#include "bogo/numerics.hpp"
#include "bogo/spectrum.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace bogo {

namespace {

constexpr std::size_t kMaxStates = 2000000;

void fill_sector(int modes, int remaining, std::vector<int>& occ, int mode, std::vector<std::vector<int>>& out) {
  if (mode == modes - 1) {
    occ[mode] = remaining;
    out.push_back(occ);
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    occ[mode] = n;
    fill_sector(modes, remaining - n, occ, mode + 1, out);
  }
  occ[mode] = 0;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(std::size_t dim, const Triplets& t) {
  SparseMatrix M(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

void require_symmetric_modes(const FockSpace& space, const Eigen::MatrixXd& A, const char* what) {
  require(A.rows() == space.modes() && A.cols() == space.modes(), ErrorCode::InvalidArgument,
          std::string(what) + " must be m×m");
  require(symmetry_defect(A) <= 1e-12 * std::max(1.0, max_abs(A)), ErrorCode::InvalidArgument,
          std::string(what) + " must be symmetric");
}

}  // namespace

std::size_t FockSpace::binomial_dimension(int modes, int n_max) {
  // C(m + n_max, m), exact in double for the sizes we admit.
  double c = 1;
  for (int i = 1; i <= modes; ++i) c = c * (n_max + i) / i;
  return static_cast<std::size_t>(std::llround(c));
}

FockSpace::FockSpace(int modes, int n_max) : m_(modes), n_max_(n_max) {
  require(modes >= 1 && modes <= 8, ErrorCode::InvalidArgument, "Fock space supports 1..8 modes");
  require(n_max >= 0 && n_max <= 255, ErrorCode::InvalidArgument, "n_max must lie in [0, 255]");
  const std::size_t dim = binomial_dimension(modes, n_max);
  require(dim <= kMaxStates, ErrorCode::DimensionOverflow,
          "Fock dimension " + std::to_string(dim) + " exceeds " + std::to_string(kMaxStates));
  states_.reserve(dim);
  std::vector<int> occ(m_, 0);
  for (int k = 0; k <= n_max_; ++k) {
    const std::size_t before = states_.size();
    fill_sector(m_, k, occ, 0, states_);
    totals_.insert(totals_.end(), states_.size() - before, k);
  }
  lookup_.reserve(dim);
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(key(states_[i]), i);
}

std::uint64_t FockSpace::key(const std::vector<int>& occ) const {
  std::uint64_t k = 0;
  for (int n : occ) k = (k << 8) | static_cast<std::uint64_t>(n);
  return k;
}

bool FockSpace::contains(const std::vector<int>& occ) const {
  if (static_cast<int>(occ.size()) != m_) return false;
  int tot = 0;
  for (int n : occ) {
    if (n < 0) return false;
    tot += n;
  }
  return tot <= n_max_;
}

std::size_t FockSpace::index(const std::vector<int>& occ) const {
  require(contains(occ), ErrorCode::InvalidArgument, "occupation vector outside the truncated Fock space");
  return lookup_.at(key(occ));
}

std::size_t FockSpace::sector_end(int k) const {
  if (k < 0) return 0;
  if (k >= n_max_) return states_.size();
  return binomial_dimension(m_, k);
}

LadderOperators build_ladder(const FockSpace& space, std::size_t nonzero_limit) {
  const std::size_t nnz = static_cast<std::size_t>(space.modes()) * space.sector_end(space.n_max() - 1);
  require(nnz <= nonzero_limit, ErrorCode::DimensionOverflow,
          "ladder operators need " + std::to_string(nnz) + " nonzeros (limit " + std::to_string(nonzero_limit) + ")");
  LadderOperators L;
  const std::size_t dim = space.dimension();
  for (int i = 0; i < space.modes(); ++i) {
    Triplets t;
    for (std::size_t s = 0; s < dim; ++s) {
      if (space.total(s) >= space.n_max()) continue;  // hard wall
      std::vector<int> occ = space.state(s);
      const double amp = std::sqrt(static_cast<double>(occ[i] + 1));
      ++occ[i];
      t.emplace_back(static_cast<int>(space.index(occ)), static_cast<int>(s), amp);
    }
    SparseMatrix c = from_triplets(dim, t);
    L.annihilate.push_back(SparseMatrix(c.transpose()));
    L.create.push_back(std::move(c));
  }
  return L;
}

SparseMatrix second_quantize(const FockSpace& space, const Eigen::MatrixXd& A) {
  require_symmetric_modes(space, A, "dΓ argument");
  const int m = space.modes();
  Triplets t;
  for (std::size_t s = 0; s < space.dimension(); ++s) {
    const std::vector<int>& occ = space.state(s);
    for (int j = 0; j < m; ++j) {
      if (occ[j] == 0) continue;
      t.emplace_back(static_cast<int>(s), static_cast<int>(s), A(j, j) * occ[j]);
      for (int i = 0; i < m; ++i) {
        if (i == j || A(i, j) == 0) continue;
        std::vector<int> out = occ;
        --out[j];
        ++out[i];
        const double amp = std::sqrt(static_cast<double>(occ[j]) * out[i]);
        t.emplace_back(static_cast<int>(space.index(out)), static_cast<int>(s), A(i, j) * amp);
      }
    }
  }
  return from_triplets(space.dimension(), t);
}

SparseMatrix number_operator(const FockSpace& space) {
  Triplets t;
  for (std::size_t s = 0; s < space.dimension(); ++s)
    if (space.total(s) > 0) t.emplace_back(static_cast<int>(s), static_cast<int>(s), space.total(s));
  return from_triplets(space.dimension(), t);
}

SparseMatrix pairing_operator(const FockSpace& space, const Eigen::MatrixXd& K) {
  require_symmetric_modes(space, K, "pairing matrix");
  const int m = space.modes();
  Triplets t;
  for (std::size_t s = 0; s < space.dimension(); ++s) {
    if (space.total(s) + 2 > space.n_max()) continue;  // hard wall
    const std::vector<int>& occ = space.state(s);
    // ½ Σ_ij K_ij a_i† a_j† = Σ_{i<j} K_ij a_i† a_j† + ½ Σ_i K_ii (a_i†)²
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        if (K(i, j) == 0) continue;
        std::vector<int> out = occ;
        ++out[i];
        ++out[j];
        double amp;
        if (i == j)
          amp = 0.5 * K(i, i) * std::sqrt(static_cast<double>(occ[i] + 1) * (occ[i] + 2));
        else
          amp = K(i, j) * std::sqrt(static_cast<double>(occ[i] + 1) * (occ[j] + 1));
        const int r = static_cast<int>(space.index(out)), c = static_cast<int>(s);
        t.emplace_back(r, c, amp);
        t.emplace_back(c, r, amp);
      }
  }
  return from_triplets(space.dimension(), t);
}

SparseMatrix QuadraticHamiltonian::assemble(const FockSpace& space) const {
  SparseMatrix H = second_quantize(space, symmetrize(D + K));
  H += pairing_operator(space, K);
  return H;
}

Eigen::VectorXd brute_force_spectrum(const FockSpace& space, const QuadraticHamiltonian& H, std::size_t n_levels) {
  require(space.dimension() <= kDenseDimensionLimit, ErrorCode::DimensionOverflow,
          "dense diagonalization limited to dimension " + std::to_string(kDenseDimensionLimit));
  const Eigen::MatrixXd M = Eigen::MatrixXd(H.assemble(space));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::NonConvergence, "Fock eigensolver failed");
  const Eigen::Index n = std::min<Eigen::Index>(static_cast<Eigen::Index>(n_levels), es.eigenvalues().size());
  return es.eigenvalues().head(n);
}

IdentityReport verify_bogoliubov_identity(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K,
                                          const std::vector<int>& n_max_list, const IdentityOptions& opts) {
  require(D.rows() == D.cols() && D.rows() >= 1 && D.rows() <= 4, ErrorCode::InvalidArgument,
          "identity check supports 1..4 modes");
  require(!n_max_list.empty() && std::is_sorted(n_max_list.begin(), n_max_list.end()), ErrorCode::InvalidArgument,
          "n_max list must be nonempty and ascending");
  const BogoliubovCore core = bogoliubov_core(D, K);
  IdentityReport rep;
  rep.trace_constant = ground_energy_constant(D, K, core.E).trace_constant;
  rep.reference = lowest_sums(core.eigenvalues, opts.levels);
  for (double& v : rep.reference) v += rep.trace_constant;

  const QuadraticHamiltonian H{D, opts.mutate_pairing_sign ? Eigen::MatrixXd(-K) : K};
  for (int n_max : n_max_list) {
    const FockSpace space(static_cast<int>(D.rows()), n_max);
    require(space.dimension() >= opts.levels, ErrorCode::InvalidArgument, "n_max too small for the level count");
    const Eigen::VectorXd bf = brute_force_spectrum(space, H, opts.levels);
    IdentityRow row{n_max, space.dimension(), 0.0};
    for (std::size_t k = 0; k < rep.reference.size(); ++k)
      row.max_deviation = std::max(row.max_deviation, std::abs(bf(static_cast<Eigen::Index>(k)) - rep.reference[k]));
    if (!rep.rows.empty()) {
      const double prev = rep.rows.back().max_deviation;
      // Slack covers eigensolver round-off; at consecutive cutoffs of equal
      // parity the deviation can repeat to the last few digits.
      if (row.max_deviation > prev * (1 + 1e-9) + 1e-11) {
        rep.monotone = false;
        require(!opts.throw_on_growth, ErrorCode::NonConvergentTruncation,
                "truncation deviation grew from " + std::to_string(prev) + " to " +
                    std::to_string(row.max_deviation) + " at n_max=" + std::to_string(n_max));
      }
    }
    rep.rows.push_back(row);
  }
  rep.converged = rep.rows.back().max_deviation < opts.tolerance;
  return rep;
}

UnitaryReport bogoliubov_unitary(const FockSpace& space, const Eigen::MatrixXd& k, int low_sector,
                                 double leak_tolerance) {
  require_symmetric_modes(space, k, "Bogoliubov kernel");
  require(low_sector >= 0 && low_sector + 2 < space.n_max(), ErrorCode::InvalidArgument,
          "low sector must sit below the top two sectors");
  require(space.dimension() <= kDenseDimensionLimit, ErrorCode::DimensionOverflow,
          "unitary is built densely; dimension limit " + std::to_string(kDenseDimensionLimit));
  const SparseMatrix P = pairing_operator(space, k);
  // Pairing part is P_up + P_up^T; the generator is P_up − P_up^T.
  Eigen::MatrixXd up = Eigen::MatrixXd(P).triangularView<Eigen::StrictlyLower>();
  const Eigen::MatrixXd G = up - up.transpose();

  UnitaryReport r;
  r.T = G.exp();
  r.low_sector = low_sector;
  const Eigen::Index nl = static_cast<Eigen::Index>(space.sector_end(low_sector));
  const Eigen::Index top = static_cast<Eigen::Index>(space.sector_end(space.n_max() - 2));
  const Eigen::Index dim = static_cast<Eigen::Index>(space.dimension());
  const Eigen::MatrixXd TP = r.T.leftCols(nl);

  r.leak = TP.bottomRows(dim - top).colwise().norm().maxCoeff();
  require(r.leak < leak_tolerance, ErrorCode::TruncationLeak,
          "Bogoliubov unitary leaks " + std::to_string(r.leak) + " into the top sectors");

  auto spectral_norm = [](const Eigen::MatrixXd& X) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X.transpose() * X, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  };

  r.orthogonality_defect =
      spectral_norm(r.T.transpose() * TP - Eigen::MatrixXd::Identity(dim, dim).leftCols(nl));

  const SymmetricEigen ek(k);
  const Eigen::MatrixXd ch = ek.apply([](double x) { return std::cosh(x); });
  const Eigen::MatrixXd sh = ek.apply([](double x) { return std::sinh(x); });
  const LadderOperators L = build_ladder(space, std::numeric_limits<std::size_t>::max());
  for (int i = 0; i < space.modes(); ++i) {
    Eigen::MatrixXd X = r.T.transpose() * (L.create[i] * TP);
    for (int j = 0; j < space.modes(); ++j) {
      X -= ch(j, i) * Eigen::MatrixXd(L.create[j]).leftCols(nl);
      X -= sh(j, i) * Eigen::MatrixXd(L.annihilate[j]).leftCols(nl);
    }
    r.action_defect = std::max(r.action_defect, spectral_norm(X));
  }

  Eigen::VectorXd n1(dim);
  for (Eigen::Index s = 0; s < dim; ++s) n1(s) = space.total(static_cast<std::size_t>(s)) + 1.0;
  const Eigen::MatrixXd Y =
      n1.cwiseSqrt().asDiagonal() * TP * n1.head(nl).cwiseSqrt().cwiseInverse().asDiagonal();
  const double s_hs = sh.squaredNorm();
  r.moment_ratio = spectral_norm(Y) * spectral_norm(Y) / (1 + s_hs);
  return r;
}

}  // namespace bogo
