#include "bogo/config.hpp"
#include "bogo/error.hpp"
#include "bogo/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed) {
  using namespace bogo;
  RunConfig cfg;
  try {
    cfg = config_path.empty() ? config_from_json(Json::object()) : load_config(config_path);
    if (!out.empty()) cfg.output_dir = out;
    if (seed) cfg.seed = *seed;
  } catch (const Error& e) {
    std::cerr << "bogo: configuration error: " << e.what() << '\n';
    return is_config_error(e.code()) || e.code() == ErrorCode::InvalidArgument ? 2 : 3;
  }
  static const std::map<std::string, std::function<RunReport(const RunConfig&)>> commands = {
      {"scatter", cmd_scatter}, {"gp", cmd_gp}, {"spectrum", cmd_spectrum},
      {"fock-check", cmd_fock_check}, {"verify", cmd_verify}};
  const RunReport rep = commands.at(command)(cfg);
  write_report(rep, cfg.output_dir);
  for (const auto& s : rep.stages) std::printf("%-22s %s\n", s.name.c_str(), to_string(s.verdict).c_str());
  if (rep.failure)
    std::fprintf(stderr, "bogo: stage %s failed: %s\n", rep.failure->stage.c_str(), rep.failure->message.c_str());
  std::printf("verdict: %s (report in %s)\n", rep.pass() ? "pass" : "fail", cfg.output_dir.c_str());
  return exit_code(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bogoliubov excitation spectra of dilute Bose gases"};
  app.require_subcommand(1);
  std::string config, out;
  std::uint64_t seed_value = 0;
  std::string chosen;
  CLI::Option* seed_opt = nullptr;
  for (const char* name : {"scatter", "gp", "spectrum", "fock-check", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    CLI::Option* o = sub->add_option("--seed", seed_value, "seed for randomized checks");
    sub->callback([&chosen, &seed_opt, o, name] {
      chosen = name;
      seed_opt = o;
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    std::optional<std::uint64_t> seed;
    if (seed_opt && seed_opt->count()) seed = seed_value;
    return run(chosen, config, out, seed);
  } catch (const bogo::Error& e) {
    std::cerr << "bogo: " << e.what() << '\n';
    return bogo::is_config_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "bogo: internal error: " << e.what() << '\n';
    return 4;
  }
}
