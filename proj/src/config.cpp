#include "bogo/config.hpp"

#include "bogo/error.hpp"
#include "bogo/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <filesystem>
#include <fstream>
#include <set>

namespace bogo {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd json_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) bad(what + " must be a nonempty array of rows");
  const std::size_t n = j.size();
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) bad(what + " must be square");
    for (std::size_t k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

// Reads known keys from an object and rejects anything else.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_ + " must be an object");
  }
  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      bad(path_ + "." + key + ": " + e.what());
    }
  }
  const Json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad("unknown key " + path_ + "." + it.key());
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string resolve(const RunConfig& c, const std::string& file) {
  namespace fs = std::filesystem;
  fs::path p(file);
  return p.is_absolute() ? p.string() : (fs::path(c.base_dir) / p).string();
}

bool dyadic(const std::vector<double>& v) {
  std::vector<double> s(v);
  std::sort(s.rbegin(), s.rend());
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (std::abs(s[i] / s[i + 1] - 2.0) > 1e-9) return false;
  return true;
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json j;
  j["potential"] = {{"family", c.potential.family}, {"radius", c.potential.radius}, {"height", c.potential.height}};
  if (!c.potential.file.empty()) j["potential"]["file"] = c.potential.file;
  j["scattering"] = {{"r_max", c.scattering.r_max}, {"points", c.scattering.points}};
  if (c.scattering.a0) j["scattering"]["a0"] = *c.scattering.a0;
  j["truncation"] = {{"N_list", c.truncation.N_list},
                     {"ell_list", c.truncation.ell_list},
                     {"profile", c.truncation.profile},
                     {"points_per_piece", c.truncation.points_per_piece},
                     {"scaling_tolerance", c.truncation.scaling_tolerance}};
  j["trap"] = {{"kind", c.trap.kind}, {"omega", c.trap.omega}, {"frequencies", c.trap.frequencies},
               {"c2", c.trap.c2},     {"c4", c.trap.c4}};
  if (!c.trap.file.empty()) j["trap"]["file"] = c.trap.file;
  j["grid"] = {{"kind", c.grid.kind}, {"extent", c.grid.extent}, {"points", c.grid.points}, {"kinetic", c.grid.kinetic}};
  j["gp"] = {{"tol", c.gp.tol},
             {"max_iterations", c.gp.max_iterations},
             {"boundary_tolerance", c.gp.boundary_tolerance},
             {"initial_step", c.gp.initial_step},
             {"max_step", c.gp.max_step}};
  j["spectrum"] = {{"N", c.spectrum.N},
                   {"ell", c.spectrum.ell},
                   {"ell_list", c.spectrum.ell_list},
                   {"channels", c.spectrum.channels},
                   {"p_max", c.spectrum.p_max},
                   {"lambda_cap", c.spectrum.lambda_cap},
                   {"levels", c.spectrum.levels}};
  j["fock"] = {{"D", matrix_json(c.fock.D)},
               {"K", matrix_json(c.fock.K)},
               {"n_max_list", c.fock.n_max_list},
               {"levels", c.fock.levels},
               {"tolerance", c.fock.tolerance},
               {"unitary_n_max", c.fock.unitary_n_max},
               {"unitary_low_sector", c.fock.unitary_low_sector}};
  if (c.fock.unitary_k) j["fock"]["unitary_k"] = matrix_json(*c.fock.unitary_k);
  j["verify"] = {{"random_cases", c.verify.random_cases},
                 {"pairing_scale", c.verify.pairing_scale},
                 {"mutate_pairing_sign", c.verify.mutate_pairing_sign},
                 {"include_trap_sweep", c.verify.include_trap_sweep}};
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const Json& j, const std::string& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  Reader top(j, "config");
  if (const Json* s = top.sub("potential")) {
    Reader r(*s, "potential");
    r.get("family", c.potential.family);
    r.get("radius", c.potential.radius);
    r.get("height", c.potential.height);
    r.get("file", c.potential.file);
    r.finish();
  }
  if (const Json* s = top.sub("scattering")) {
    Reader r(*s, "scattering");
    r.get("r_max", c.scattering.r_max);
    r.get("points", c.scattering.points);
    if (const Json* a = r.sub("a0")) {
      if (a->is_number()) c.scattering.a0 = a->get<double>();
      else if (!(a->is_string() && a->get<std::string>() == "computed")) bad("scattering.a0 must be a number or \"computed\"");
    }
    r.finish();
  }
  if (const Json* s = top.sub("truncation")) {
    Reader r(*s, "truncation");
    r.get("N_list", c.truncation.N_list);
    r.get("ell_list", c.truncation.ell_list);
    r.get("profile", c.truncation.profile);
    r.get("points_per_piece", c.truncation.points_per_piece);
    r.get("scaling_tolerance", c.truncation.scaling_tolerance);
    r.finish();
  }
  if (const Json* s = top.sub("trap")) {
    Reader r(*s, "trap");
    r.get("kind", c.trap.kind);
    r.get("omega", c.trap.omega);
    r.get("frequencies", c.trap.frequencies);
    r.get("c2", c.trap.c2);
    r.get("c4", c.trap.c4);
    r.get("file", c.trap.file);
    r.finish();
  }
  if (const Json* s = top.sub("grid")) {
    Reader r(*s, "grid");
    r.get("kind", c.grid.kind);
    r.get("extent", c.grid.extent);
    r.get("points", c.grid.points);
    r.get("kinetic", c.grid.kinetic);
    r.finish();
  }
  if (const Json* s = top.sub("gp")) {
    Reader r(*s, "gp");
    r.get("tol", c.gp.tol);
    r.get("max_iterations", c.gp.max_iterations);
    r.get("boundary_tolerance", c.gp.boundary_tolerance);
    r.get("initial_step", c.gp.initial_step);
    r.get("max_step", c.gp.max_step);
    r.finish();
  }
  if (const Json* s = top.sub("spectrum")) {
    Reader r(*s, "spectrum");
    r.get("N", c.spectrum.N);
    r.get("ell", c.spectrum.ell);
    r.get("ell_list", c.spectrum.ell_list);
    r.get("channels", c.spectrum.channels);
    r.get("p_max", c.spectrum.p_max);
    r.get("lambda_cap", c.spectrum.lambda_cap);
    r.get("levels", c.spectrum.levels);
    r.finish();
  }
  if (const Json* s = top.sub("fock")) {
    Reader r(*s, "fock");
    if (const Json* m = r.sub("D")) c.fock.D = json_matrix(*m, "fock.D");
    if (const Json* m = r.sub("K")) c.fock.K = json_matrix(*m, "fock.K");
    if (const Json* m = r.sub("unitary_k")) c.fock.unitary_k = json_matrix(*m, "fock.unitary_k");
    r.get("n_max_list", c.fock.n_max_list);
    r.get("levels", c.fock.levels);
    r.get("tolerance", c.fock.tolerance);
    r.get("unitary_n_max", c.fock.unitary_n_max);
    r.get("unitary_low_sector", c.fock.unitary_low_sector);
    r.finish();
  }
  if (const Json* s = top.sub("verify")) {
    Reader r(*s, "verify");
    r.get("random_cases", c.verify.random_cases);
    r.get("pairing_scale", c.verify.pairing_scale);
    r.get("mutate_pairing_sign", c.verify.mutate_pairing_sign);
    r.get("include_trap_sweep", c.verify.include_trap_sweep);
    r.finish();
  }
  top.get("output_dir", c.output_dir);
  top.get("seed", c.seed);
  top.finish();
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  const auto dir = std::filesystem::path(path).parent_path();
  return config_from_json(j, dir.empty() ? "." : dir.string());
}

void validate(const RunConfig& c) {
  namespace fs = std::filesystem;
  const auto& p = c.potential;
  if (p.family != "zero" && p.family != "soft_sphere" && p.family != "smooth_bump" && p.family != "tabulated")
    bad("potential.family must be zero, soft_sphere, smooth_bump or tabulated");
  if (p.family == "soft_sphere" || p.family == "smooth_bump") {
    if (!(p.radius > 0)) bad("potential.radius must be positive");
    if (!(p.height >= 0)) bad("potential.height must be nonnegative");
  }
  if (p.family == "tabulated" && !fs::exists(resolve(c, p.file))) bad("potential.file not found: " + p.file);
  if (!(c.scattering.r_max > 0) || c.scattering.points < 512) bad("scattering needs r_max > 0 and points >= 512");
  if (c.scattering.a0 && !(*c.scattering.a0 >= 0)) bad("scattering.a0 must be nonnegative");

  const auto& t = c.truncation;
  for (double N : t.N_list)
    if (!(N >= 1)) bad("truncation.N_list entries must be >= 1");
  for (double l : t.ell_list)
    if (!(l > 0 && l <= 1)) bad("truncation.ell_list entries must lie in (0, 1]");
  try {
    parse_profile(t.profile);
  } catch (const Error&) {
    bad("truncation.profile must be smoothstep or cosine");
  }
  if (t.points_per_piece < 32) bad("truncation.points_per_piece must be >= 32");
  if (!(t.scaling_tolerance > 0)) bad("truncation.scaling_tolerance must be positive");

  const auto& tr = c.trap;
  if (tr.kind != "flat" && tr.kind != "harmonic" && tr.kind != "anisotropic" && tr.kind != "quartic" &&
      tr.kind != "tabulated")
    bad("trap.kind must be flat, harmonic, anisotropic, quartic or tabulated");
  if (tr.kind == "harmonic" && !(tr.omega > 0)) bad("trap.omega must be positive");
  if (tr.kind == "anisotropic" &&
      (tr.frequencies.size() != 3 || !(tr.frequencies[0] > 0 && tr.frequencies[1] > 0 && tr.frequencies[2] > 0)))
    bad("trap.frequencies must hold three positive values");
  if (tr.kind == "quartic" && !(tr.c2 >= 0 && tr.c4 >= 0 && tr.c2 + tr.c4 > 0)) bad("quartic trap needs c2, c4 >= 0");
  if (tr.kind == "tabulated" && !fs::exists(resolve(c, tr.file))) bad("trap.file not found: " + tr.file);

  const auto& g = c.grid;
  if (g.kind != "radial" && g.kind != "cartesian" && g.kind != "torus") bad("grid.kind must be radial, cartesian or torus");
  if (g.kind != "torus") {
    if (!(g.extent > 0)) bad("grid.extent must be positive");
    if (g.points < 4) bad("grid.points must be >= 4");
    if (g.kind == "cartesian" && static_cast<long>(g.points) * g.points * g.points > 8000)
      bad("cartesian grid limited to 8000 nodes");
    if (g.kind == "radial" && tr.kind == "anisotropic") bad("anisotropic trap needs a cartesian grid");
    if (tr.kind == "flat") bad("flat trap only makes sense on the torus");
  } else if (tr.kind != "flat") {
    bad("torus grid requires trap.kind = flat");
  }
  try {
    parse_kinetic(g.kinetic);
  } catch (const Error&) {
    bad("grid.kinetic must be spectral or fd2");
  }
  if (!(c.gp.tol > 0) || c.gp.max_iterations < 1 || !(c.gp.initial_step > 0) || !(c.gp.max_step >= c.gp.initial_step))
    bad("gp options out of range");

  const auto& s = c.spectrum;
  if (!(s.N >= 1)) bad("spectrum.N must be >= 1");
  if (!(s.ell > 0 && s.ell <= 1)) bad("spectrum.ell must lie in (0, 1]");
  if (!s.ell_list.empty()) {
    if (s.ell_list.size() < 3 || !dyadic(s.ell_list)) bad("spectrum.ell_list needs at least 3 dyadic values");
    for (double l : s.ell_list)
      if (!(l > 0 && l <= 1)) bad("spectrum.ell_list entries must lie in (0, 1]");
  }
  for (int l : s.channels)
    if (l < 0 || l > 20) bad("spectrum.channels entries must lie in [0, 20]");
  if (s.channels.empty() && g.kind == "radial") bad("spectrum.channels must be nonempty");
  if (!(s.p_max >= 2 * kPi)) bad("spectrum.p_max must be at least 2π");
  if (!(s.lambda_cap >= 0)) bad("spectrum.lambda_cap must be nonnegative");
  if (s.levels < 1) bad("spectrum.levels must be >= 1");

  // Cutoffs at or below 2R0/N leave no room between the potential and χ.
  if (p.family == "soft_sphere" || p.family == "smooth_bump") {
    auto check_ell = [&](double ell, double N, const char* where) {
      if (ell <= 2 * p.radius / N)
        throw Error(ErrorCode::CutoffTooSmall, std::string(where) + ": ell = " + std::to_string(ell) +
                                                   " <= 2 R0 / N = " + std::to_string(2 * p.radius / N));
    };
    for (double N : t.N_list)
      for (double l : t.ell_list) check_ell(l, N, "truncation");
    check_ell(s.ell, s.N, "spectrum");
    for (double l : s.ell_list) check_ell(l, s.N, "spectrum.ell_list");
  }

  const auto& f = c.fock;
  const Eigen::Index m = f.D.rows();
  if (m < 1 || m > 4) bad("fock.D must be m×m with 1 <= m <= 4");
  if (f.K.rows() != m) bad("fock.K must match fock.D");
  if ((f.D - f.D.transpose()).cwiseAbs().maxCoeff() > 0 || (f.K - f.K.transpose()).cwiseAbs().maxCoeff() > 0)
    bad("fock.D and fock.K must be symmetric");
  if (f.n_max_list.empty() || !std::is_sorted(f.n_max_list.begin(), f.n_max_list.end()) || f.n_max_list.front() < 1 ||
      f.n_max_list.back() > 60)
    bad("fock.n_max_list must be ascending within [1, 60]");
  if (f.levels < 1) bad("fock.levels must be >= 1");
  if (f.unitary_k && (f.unitary_k->rows() > 4 || f.unitary_k->rows() < 1)) bad("fock.unitary_k must be m×m, m <= 4");
  if (f.unitary_low_sector < 0 || f.unitary_low_sector + 2 >= f.unitary_n_max || f.unitary_n_max > 60)
    bad("fock unitary sectors out of range");
  if (c.verify.random_cases < 0 || !(c.verify.pairing_scale >= 0 && c.verify.pairing_scale < 1))
    bad("verify.random_cases >= 0 and 0 <= pairing_scale < 1 required");
  if (c.output_dir.empty()) bad("output_dir must be nonempty");
}

RadialPotential make_potential(const RunConfig& c) {
  const auto& p = c.potential;
  if (p.family == "zero") return RadialPotential::zero();
  if (p.family == "soft_sphere") return RadialPotential::soft_sphere(p.radius, p.height);
  if (p.family == "smooth_bump") return RadialPotential::smooth_bump(p.radius, p.height);
  return RadialPotential::from_csv(resolve(c, p.file));
}

ExternalPotential make_trap(const RunConfig& c) {
  const auto& t = c.trap;
  if (t.kind == "flat") return ExternalPotential::flat();
  if (t.kind == "harmonic") return ExternalPotential::harmonic(t.omega);
  if (t.kind == "anisotropic") return ExternalPotential::anisotropic(t.frequencies[0], t.frequencies[1], t.frequencies[2]);
  if (t.kind == "quartic") return ExternalPotential::quartic(t.c2, t.c4);
  return ExternalPotential::from_csv(resolve(c, t.file));
}

Discretization make_discretization(const RunConfig& c) {
  const KineticScheme k = parse_kinetic(c.grid.kinetic);
  if (c.grid.kind == "torus") return TorusGrid{};
  if (c.grid.kind == "cartesian") return CartesianGrid{c.grid.extent, c.grid.points, k};
  return RadialGrid{c.grid.extent, c.grid.points, k};
}

CutoffProfile make_profile(const RunConfig& c) { return parse_profile(c.truncation.profile); }

}  // namespace bogo
