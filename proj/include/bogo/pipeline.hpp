#pragma once

#include "bogo/config.hpp"
#include "bogo/error.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bogo {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Verdict { Pass, Fail, Skipped };
std::string to_string(Verdict v);

struct StageResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  Json data = Json::object();
  double seconds = 0.0;  // goes to timings.json only
};

struct StageFailure {
  std::string stage;
  ErrorCode code;
  std::string message;
};

struct RunReport {
  std::string command;
  Json config;
  std::vector<StageResult> stages;
  std::optional<StageFailure> failure;

  bool pass() const;
  // Deterministic: no timings, no paths outside the config echo.
  Json to_json() const;
  Json timings() const;
  const StageResult* stage(const std::string& name) const;
};

// 0 pass, 2 configuration error, 3 numerical failure or failed verdict.
int exit_code(const RunReport& report);
bool is_config_error(ErrorCode code);

// Writes report.json and timings.json into c.output_dir (created if needed).
void write_report(const RunReport& report, const std::string& dir);

RunReport cmd_scatter(const RunConfig& c);
RunReport cmd_gp(const RunConfig& c);
RunReport cmd_spectrum(const RunConfig& c);
RunReport cmd_fock_check(const RunConfig& c);
RunReport cmd_verify(const RunConfig& c);

// Shared plumbing, exposed for tests.
void write_columns(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

// Number of many-body states 2ωK above the ground state of the isotropic
// harmonic oscillator −Δ + ω²r², K = 0..K_max (generating-function count).
std::vector<long> harmonic_level_counts(int K_max);

}  // namespace bogo
