#pragma once

#include "bogo/basis.hpp"
#include "bogo/bogoliubov.hpp"
#include "bogo/gp.hpp"
#include "bogo/operators.hpp"
#include "bogo/pipeline.hpp"
#include "bogo/scattering.hpp"

#include <chrono>
#include <memory>
#include <optional>

namespace bogo::detail {

struct StageAbort {};

// Runs one stage; a library error marks the stage failed, records the
// failure on the report and aborts the command.
template <class F>
void run_stage(RunReport& rep, const std::string& name, F&& body) {
  StageResult s;
  s.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  try {
    body(s);
  } catch (const Error& e) {
    s.verdict = Verdict::Fail;
    s.data["error"] = e.what();
    s.seconds = elapsed();
    rep.stages.push_back(std::move(s));
    rep.failure = StageFailure{name, e.code(), e.what()};
    throw StageAbort{};
  }
  s.seconds = elapsed();
  rep.stages.push_back(std::move(s));
}

inline Verdict verdict(bool ok) { return ok ? Verdict::Pass : Verdict::Fail; }

Json to_json_vec(const Eigen::VectorXd& v);
Json to_json_vec(const std::vector<double>& v);

std::shared_ptr<const ScatteringSolution> solve_from_config(const RunConfig& c);
GPState gp_from_config(const RunConfig& c, double a0);

struct ScatteringSummary {
  double a0_fit = 0, a0_variational = 0, a0_integral = 0;
  std::optional<double> closed_form;
  double max_rel_spread = 0;
  bool pass = false;
};
ScatteringSummary summarize_scattering(const ScatteringSolution& sol);

struct IdentitySummary {
  double max_rel_deviation = 0;
  double max_profile_gap = 0;
  Json rows = Json::array();
  bool pass = false;
};
IdentitySummary truncation_identity(std::shared_ptr<const ScatteringSolution> sol, const std::vector<double>& N_list,
                                    const std::vector<double>& ell_list, int points_per_piece);

struct OneBody {
  Eigen::VectorXd e_inf, e;  // merged over channels with multiplicity; e empty without truncation
  TraceConstants traces_inf, traces;
  bool trace_nonnegative = true;
  double symplectic_defect = 0, polar_defect = 0, root_defect = 0;
  std::size_t modes = 0;
  Json blocks = Json::array();
};
OneBody one_body(const GPState& state, const TruncatedScattering* trunc, const SpectrumSpec& spec, bool polar);

// Operators reused across an ℓ sweep: D and K∞ per channel.
class SweepOperators {
 public:
  SweepOperators(const GPState& state, const SpectrumSpec& spec);
  Eigen::VectorXd limit() const;
  Eigen::VectorXd eigenvalues(const TruncatedScattering& trunc) const;

 private:
  struct Block {
    int l;
    BasisPtr basis;
    OperatorMatrix D, K_inf;
  };
  const GPState& state_;
  SpectrumSpec spec_;
  std::vector<Block> blocks_;
};

Eigen::VectorXd expand_shells(const TorusBogoliubov& t);

}  // namespace bogo::detail
