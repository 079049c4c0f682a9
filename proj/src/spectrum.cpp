#include "bogo/spectrum.hpp"

#include "bogo/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace bogo {

namespace {

struct Sum {
  double value;
  std::vector<int> occ;
};

void enumerate(const std::vector<double>& e, double cap, std::size_t mode, double value, std::vector<int>& occ,
               std::vector<Sum>& out) {
  if (mode == e.size()) {
    require(out.size() < kMaxOccupationVectors, ErrorCode::ExplosionGuard,
            "more than 1e6 occupation vectors below the cap; lower Lambda");
    out.push_back({value, occ});
    return;
  }
  for (int n = 0;; ++n) {
    const double v = value + n * e[mode];
    if (v > cap + kLevelMergeTolerance) break;
    occ[mode] = n;
    enumerate(e, cap, mode + 1, v, occ, out);
  }
  occ[mode] = 0;
}

std::vector<double> sorted_positive(const Eigen::VectorXd& eigs) {
  std::vector<double> e(eigs.data(), eigs.data() + eigs.size());
  for (double x : e) require(std::isfinite(x) && x > 0, ErrorCode::InvalidArgument, "one-body eigenvalues must be positive");
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

long SpectrumReport::total_states() const {
  long n = 0;
  for (const auto& l : levels) n += l.multiplicity;
  return n;
}

std::vector<double> SpectrumReport::values_with_multiplicity() const {
  std::vector<double> v;
  for (const auto& l : levels) v.insert(v.end(), static_cast<std::size_t>(l.multiplicity), l.value);
  return v;
}

SpectrumReport excitation_spectrum(const Eigen::VectorXd& eigs, double lambda_cap, std::string provenance) {
  require(std::isfinite(lambda_cap) && lambda_cap >= 0, ErrorCode::InvalidArgument, "Lambda must be nonnegative");
  const std::vector<double> e = sorted_positive(eigs);
  // Modes above the cap can only appear with occupation zero.
  std::size_t active = 0;
  while (active < e.size() && e[active] <= lambda_cap + kLevelMergeTolerance) ++active;
  std::vector<double> ea(e.begin(), e.begin() + static_cast<long>(active));
  std::vector<Sum> sums;
  std::vector<int> occ(active, 0);
  enumerate(ea, lambda_cap, 0, 0.0, occ, sums);
  std::stable_sort(sums.begin(), sums.end(), [](const Sum& a, const Sum& b) { return a.value < b.value; });

  SpectrumReport r;
  r.eigenvalues = Eigen::Map<const Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
  r.lambda_cap = lambda_cap;
  r.provenance = std::move(provenance);
  for (auto& s : sums) {
    if (!r.levels.empty() && s.value - r.levels.back().value <= kLevelMergeTolerance) {
      ++r.levels.back().multiplicity;
      continue;
    }
    SpectrumLevel l;
    l.value = s.value;
    l.multiplicity = 1;
    l.witness = std::move(s.occ);
    l.witness.resize(e.size(), 0);
    r.levels.push_back(std::move(l));
  }
  return r;
}

std::vector<double> lowest_sums(const Eigen::VectorXd& eigs, std::size_t count) {
  if (count == 0) return {};
  const std::vector<double> e = sorted_positive(eigs);
  // Grow the cap until enough states sit below it.
  double cap = e.empty() ? 0 : e.front();
  for (;;) {
    const SpectrumReport r = excitation_spectrum(eigs, cap);
    std::vector<double> v = r.values_with_multiplicity();
    if (v.size() >= count || e.empty()) {
      v.resize(std::min(v.size(), count));
      return v;
    }
    cap *= 1.5;
  }
}

std::string witness_string(const std::vector<int>& occupation) {
  std::string s;
  for (std::size_t i = 0; i < occupation.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(occupation[i]);
  }
  return s;
}

SpectrumDiff spectrum_diff(const SpectrumReport& a, const SpectrumReport& b) {
  require(std::abs(a.lambda_cap - b.lambda_cap) <= 1e-12 * std::max(1.0, std::abs(a.lambda_cap)),
          ErrorCode::CapMismatch, "reports were built with different Lambda");
  SpectrumDiff d;
  const std::size_t n = std::min(a.levels.size(), b.levels.size());
  for (std::size_t k = 0; k < n; ++k) {
    SpectrumDiffRow row;
    row.rank = k;
    row.value_a = a.levels[k].value;
    row.value_b = b.levels[k].value;
    row.abs_gap = std::abs(row.value_a - row.value_b);
    const double scale = std::max(std::abs(row.value_a), std::abs(row.value_b));
    row.rel_gap = scale > 0 ? row.abs_gap / scale : 0.0;
    row.multiplicity_a = a.levels[k].multiplicity;
    row.multiplicity_b = b.levels[k].multiplicity;
    if (row.multiplicity_a != row.multiplicity_b) ++d.multiplicity_mismatches;
    d.max_abs_gap = std::max(d.max_abs_gap, row.abs_gap);
    d.max_rel_gap = std::max(d.max_rel_gap, row.rel_gap);
    d.rows.push_back(row);
  }
  d.unmatched = std::max(a.levels.size(), b.levels.size()) - n;
  return d;
}

void write_spectrum_csv(const SpectrumReport& report, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  out << "value,multiplicity,witness\n";
  char buf[64];
  for (const auto& l : report.levels) {
    std::snprintf(buf, sizeof buf, "%.17g", l.value);
    out << buf << ',' << l.multiplicity << ",\"" << witness_string(l.witness) << "\"\n";
  }
}

}  // namespace bogo
