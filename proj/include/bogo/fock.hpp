#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace bogo {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultNonzeroLimit = 200000;
inline constexpr std::size_t kDenseDimensionLimit = 5000;

// Occupation-number basis with Σn_i ≤ n_max, ordered by total particle
// number and lexicographically (descending in n_1) within a sector.
class FockSpace {
 public:
  FockSpace(int modes, int n_max);

  int modes() const { return m_; }
  int n_max() const { return n_max_; }
  std::size_t dimension() const { return states_.size(); }
  static std::size_t binomial_dimension(int modes, int n_max);

  const std::vector<int>& state(std::size_t i) const { return states_.at(i); }
  int total(std::size_t i) const { return totals_.at(i); }
  std::size_t index(const std::vector<int>& occupation) const;
  bool contains(const std::vector<int>& occupation) const;
  // Indices with Σn ≤ k.
  std::size_t sector_end(int k) const;

 private:
  std::uint64_t key(const std::vector<int>& occ) const;
  int m_, n_max_;
  std::vector<std::vector<int>> states_;
  std::vector<int> totals_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

struct LadderOperators {
  std::vector<SparseMatrix> create, annihilate;
};

LadderOperators build_ladder(const FockSpace& space, std::size_t nonzero_limit = kDefaultNonzeroLimit);

SparseMatrix second_quantize(const FockSpace& space, const Eigen::MatrixXd& A);
SparseMatrix number_operator(const FockSpace& space);

// ½ Σ K_ij (a_i† a_j† + a_i a_j) with the hard-wall truncation.
SparseMatrix pairing_operator(const FockSpace& space, const Eigen::MatrixXd& K);

struct QuadraticHamiltonian {
  Eigen::MatrixXd D, K;
  // dΓ(D) + dΓ(K) + ½ Σ K_ij (a_i† a_j† + a_i a_j)
  SparseMatrix assemble(const FockSpace& space) const;
};

Eigen::VectorXd brute_force_spectrum(const FockSpace& space, const QuadraticHamiltonian& H, std::size_t n_levels);

struct IdentityRow {
  int n_max = 0;
  std::size_t dimension = 0;
  double max_deviation = 0;
};

struct IdentityReport {
  std::vector<double> reference;  // Σ n_i e_i − ½Tr(D+K−E), lowest levels
  std::vector<IdentityRow> rows;
  double trace_constant = 0;
  bool monotone = true;
  bool converged = false;  // final deviation < tolerance
  bool pass() const { return monotone && converged; }
};

struct IdentityOptions {
  std::size_t levels = 8;
  double tolerance = 1e-6;
  // Flips the sign of K in the Fock matrix only; used to check that the
  // verify battery notices a broken Hamiltonian.
  bool mutate_pairing_sign = false;
  // Throw NonConvergentTruncation instead of reporting monotone = false.
  bool throw_on_growth = true;
};

IdentityReport verify_bogoliubov_identity(const Eigen::MatrixXd& D, const Eigen::MatrixXd& K,
                                          const std::vector<int>& n_max_list, const IdentityOptions& opts = {});

struct UnitaryReport {
  Eigen::MatrixXd T;
  int low_sector = 0;
  double leak = 0;                  // weight of T·P_low in the top two sectors
  double action_defect = 0;         // max_i ‖(Tᵀ a_i† T − a†(ch k e_i) − a(sh k e_i)) P_low‖
  double orthogonality_defect = 0;  // ‖(TᵀT − I) P_low‖
  double moment_ratio = 0;          // sup ⟨Tᵀ(𝒩+1)T⟩/⟨𝒩+1⟩ over P_low, divided by 1+‖sh k‖²_HS
};

// T = exp(½ Σ k_ij (a_i† a_j† − a_i a_j)).
UnitaryReport bogoliubov_unitary(const FockSpace& space, const Eigen::MatrixXd& k, int low_sector,
                                 double leak_tolerance = 1e-6);

}  // namespace bogo
