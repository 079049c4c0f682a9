#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace bogo {

struct SpectrumLevel {
  double value = 0;
  long multiplicity = 0;
  std::vector<int> witness;  // occupations of the sorted one-body modes
};

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // sorted ascending
  double lambda_cap = 0;
  std::vector<SpectrumLevel> levels;
  std::string provenance;
  // Analytic error term of the many-body statement; a label only.
  std::string error_label = "O(Lambda N^(-1/16))";

  long total_states() const;
  std::vector<double> values_with_multiplicity() const;
};

// Merge tolerance for floating sums of degenerate modes.
inline constexpr double kLevelMergeTolerance = 1e-9;
inline constexpr std::size_t kMaxOccupationVectors = 1000000;

SpectrumReport excitation_spectrum(const Eigen::VectorXd& eigs, double lambda_cap, std::string provenance = "");

// Lowest `count` sums Σ n_i e_i counted with multiplicity.
std::vector<double> lowest_sums(const Eigen::VectorXd& eigs, std::size_t count);

std::string witness_string(const std::vector<int>& occupation);

struct SpectrumDiffRow {
  std::size_t rank = 0;
  double value_a = 0, value_b = 0, abs_gap = 0, rel_gap = 0;
  long multiplicity_a = 0, multiplicity_b = 0;
};

struct SpectrumDiff {
  std::vector<SpectrumDiffRow> rows;
  std::size_t unmatched = 0;  // levels present in only one report
  std::size_t multiplicity_mismatches = 0;
  double max_abs_gap = 0, max_rel_gap = 0;
};

SpectrumDiff spectrum_diff(const SpectrumReport& a, const SpectrumReport& b);

void write_spectrum_csv(const SpectrumReport& report, const std::string& path);

}  // namespace bogo
