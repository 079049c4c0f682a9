#include "bogo/gp.hpp"

#include "bogo/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bogo {

ExternalPotential ExternalPotential::flat() { return {}; }

ExternalPotential ExternalPotential::harmonic(double omega) {
  require(omega > 0, ErrorCode::InvalidArgument, "trap frequency must be positive");
  ExternalPotential p;
  p.kind_ = Kind::Harmonic;
  p.w_ = Eigen::Vector3d::Constant(omega);
  return p;
}

ExternalPotential ExternalPotential::anisotropic(double wx, double wy, double wz) {
  require(wx > 0 && wy > 0 && wz > 0, ErrorCode::InvalidArgument, "trap frequencies must be positive");
  ExternalPotential p;
  p.kind_ = Kind::Anisotropic;
  p.w_ = {wx, wy, wz};
  return p;
}

ExternalPotential ExternalPotential::quartic(double c2, double c4) {
  require(c2 >= 0 && c4 > 0, ErrorCode::InvalidArgument, "quartic trap needs c2 >= 0 and c4 > 0");
  ExternalPotential p;
  p.kind_ = Kind::Quartic;
  p.w_ = Eigen::Vector3d::Constant(std::sqrt(c2));
  p.c4_ = c4;
  return p;
}

ExternalPotential ExternalPotential::tabulated(std::vector<double> r, std::vector<double> v) {
  require(r.size() >= 3 && r.size() == v.size() && r.front() == 0.0, ErrorCode::InvalidArgument,
          "tabulated trap needs >= 3 rows starting at r = 0");
  for (std::size_t j = 0; j < r.size(); ++j) {
    require(v[j] >= 0 && std::isfinite(v[j]), ErrorCode::InvalidArgument, "trap values must be finite and >= 0");
    if (j) require(r[j] > r[j - 1], ErrorCode::InvalidArgument, "trap radii must increase strictly");
  }
  require(v.back() > v.front(), ErrorCode::InvalidArgument, "tabulated trap must grow outward");
  ExternalPotential p;
  p.kind_ = Kind::Tabulated;
  p.table_r_ = std::move(r);
  p.table_v_ = std::move(v);
  return p;
}

ExternalPotential ExternalPotential::from_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::ConfigError, "cannot open trap table " + path);
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) {
      r.push_back(a);
      v.push_back(b);
    }
  }
  return tabulated(std::move(r), std::move(v));
}

std::string ExternalPotential::name() const {
  switch (kind_) {
    case Kind::Flat: return "flat";
    case Kind::Harmonic: return "harmonic";
    case Kind::Anisotropic: return "anisotropic";
    case Kind::Quartic: return "quartic";
    case Kind::Tabulated: return "tabulated";
  }
  return "unknown";
}

double ExternalPotential::radial_value(double r) const {
  switch (kind_) {
    case Kind::Flat: return 0.0;
    case Kind::Harmonic: return w_(0) * w_(0) * r * r;
    case Kind::Anisotropic: throw Error(ErrorCode::InvalidArgument, "anisotropic trap is not radial");
    case Kind::Quartic: return w_(0) * w_(0) * r * r + c4_ * r * r * r * r;
    case Kind::Tabulated: {
      if (r >= table_r_.back()) return table_v_.back() * (r / table_r_.back()) * (r / table_r_.back());
      auto it = std::upper_bound(table_r_.begin(), table_r_.end(), r);
      const std::size_t k = static_cast<std::size_t>(it - table_r_.begin()) - 1;
      const double t = (r - table_r_[k]) / (table_r_[k + 1] - table_r_[k]);
      return (1 - t) * table_v_[k] + t * table_v_[k + 1];
    }
  }
  return 0.0;
}

double ExternalPotential::operator()(const Eigen::Vector3d& x) const {
  if (kind_ == Kind::Anisotropic) return (w_.array().square() * x.array().square()).sum();
  return radial_value(x.norm());
}

Eigen::Vector3d ExternalPotential::curvature() const {
  if (kind_ == Kind::Tabulated) {
    const double r1 = table_r_[1];
    return Eigen::Vector3d::Constant(std::max((table_v_[1] - table_v_[0]) / (r1 * r1), 1e-2));
  }
  if (kind_ == Kind::Flat) return Eigen::Vector3d::Zero();
  if (kind_ == Kind::Quartic && w_(0) == 0) return Eigen::Vector3d::Constant(std::sqrt(c4_));
  return w_.array().square();
}

double GPState::coupling() const { return 8 * kPi * a0; }

GPState torus_state(double a0) {
  require(a0 >= 0, ErrorCode::InvalidArgument, "a0 must be nonnegative");
  GPState s;
  s.discretization = TorusGrid{};
  s.trap = ExternalPotential::flat();
  s.a0 = a0;
  s.phi = Eigen::VectorXd::Ones(1);
  s.coefficients = Eigen::VectorXd::Ones(1);
  s.mu = 8 * kPi * a0;
  s.energy = 4 * kPi * a0;
  return s;
}

namespace {

struct Problem {
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd V;  // V_ext at the nodes
  Eigen::VectorXd w;  // quadrature weights
  double g;           // 8π a0

  Eigen::VectorXd local(const Eigen::VectorXd& c) const {
    return V + g * c.cwiseAbs2().cwiseQuotient(w);
  }
  Eigen::VectorXd apply(const Eigen::VectorXd& c, const Eigen::VectorXd& loc) const {
    return mesh->apply_kinetic(c) + loc.cwiseProduct(c);
  }
  double energy(const Eigen::VectorXd& c) const {
    return mesh->kinetic_energy(c) + V.dot(c.cwiseAbs2()) + 0.5 * g * c.cwiseAbs2().cwiseAbs2().cwiseQuotient(w).sum();
  }
};

Problem setup(const ExternalPotential& trap, double a0, std::shared_ptr<const Mesh> mesh) {
  Problem p{mesh, Eigen::VectorXd(mesh->size()), mesh->weights(), 8 * kPi * a0};
  for (std::size_t j = 0; j < mesh->size(); ++j) p.V(j) = trap(mesh->point(j));
  return p;
}

// Solves (I + dt(T + diag(loc))) x = b by CG preconditioned with the exact
// inverse of I + dt(T + shift).
Eigen::VectorXd implicit_step(const Problem& p, const Eigen::VectorXd& loc, double dt, const Eigen::VectorXd& b) {
  const double shift = loc.minCoeff();
  auto A = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x + dt * p.apply(x, loc); };
  auto M = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return p.mesh->solve_shifted(x, dt, shift); };
  Eigen::VectorXd x = M(b);
  Eigen::VectorXd r = b - A(x);
  Eigen::VectorXd z = M(r), d = z;
  double rz = r.dot(z);
  const double bnorm = b.norm();
  for (int it = 0; it < 500 && r.norm() > 1e-14 * bnorm; ++it) {
    const Eigen::VectorXd Ad = A(d);
    const double alpha = rz / d.dot(Ad);
    x += alpha * d;
    r -= alpha * Ad;
    z = M(r);
    const double rz_new = r.dot(z);
    d = z + (rz_new / rz) * d;
    rz = rz_new;
  }
  return x;
}

double boundary_max(const Mesh& mesh, const Eigen::VectorXd& phi) {
  double m = 0.0;
  for (std::size_t j : mesh.boundary_nodes()) m = std::max(m, std::abs(phi(j)));
  return m;
}

}  // namespace

GPState make_state(const ExternalPotential& trap, double a0, std::shared_ptr<const Mesh> mesh,
                   const Eigen::VectorXd& coefficients) {
  require(mesh != nullptr, ErrorCode::InvalidArgument, "trapped state needs a mesh");
  require(static_cast<std::size_t>(coefficients.size()) == mesh->size(), ErrorCode::GridMismatch,
          "coefficient vector does not match the mesh");
  require(a0 >= 0, ErrorCode::InvalidArgument, "a0 must be nonnegative");
  GPState s;
  s.discretization = mesh->discretization();
  s.mesh = mesh;
  s.trap = trap;
  s.a0 = a0;
  s.coefficients = coefficients / coefficients.norm();
  s.phi = s.coefficients.cwiseQuotient(mesh->weights().cwiseSqrt());
  s.mu = chemical_potential(s);
  s.energy = gp_energy(s);
  s.residual = gp_residual(s);
  s.boundary_value = boundary_max(*mesh, s.phi);
  return s;
}

GPState minimize_gp(const ExternalPotential& trap, double a0, const Discretization& discretization,
                    const GPOptions& options) {
  require(a0 >= 0, ErrorCode::InvalidArgument, "a0 must be nonnegative");
  if (std::holds_alternative<TorusGrid>(discretization)) return torus_state(a0);
  require(options.tol > 0 && options.max_iterations > 0, ErrorCode::InvalidArgument, "bad GP options");
  if (std::holds_alternative<RadialGrid>(discretization))
    require(trap.radial(), ErrorCode::InvalidArgument, "radial grid needs a radial trap");
  auto mesh = std::make_shared<const Mesh>(discretization);
  const Problem p = setup(trap, a0, mesh);

  // Gaussian matched to the harmonic part of the trap at the origin.
  const Eigen::Vector3d kappa = trap.curvature().cwiseMax(1e-6).cwiseSqrt();
  Eigen::VectorXd c(mesh->size());
  for (std::size_t j = 0; j < mesh->size(); ++j) {
    const Eigen::Vector3d x = mesh->point(j);
    const double q = mesh->radial() ? kappa(0) * x(0) * x(0) : (kappa.array() * x.array().square()).sum();
    c(j) = std::sqrt(p.w(j)) * std::exp(-0.5 * q);
  }
  c.normalize();

  double E = p.energy(c);
  std::vector<double> history{E};
  double dt = options.initial_step;
  double residual = 0.0;
  int it = 0;
  int streak = 0;
  for (; it < options.max_iterations; ++it) {

    const Eigen::VectorXd loc = p.local(c);
    const Eigen::VectorXd Hc = p.apply(c, loc);
    const double mu = c.dot(Hc);
    residual = (Hc - mu * c).norm();
    if (residual < options.tol) break;
    while (true) {
      Eigen::VectorXd x = implicit_step(p, loc, dt, c);
      x.normalize();
      const double Ex = p.energy(x);
      if (Ex <= E + 1e-12 * std::max(1.0, std::abs(E))) {
        c = std::move(x);
        E = Ex;
        history.push_back(E);
        if (++streak >= 4) {
          dt = std::min(2 * dt, options.max_step);
          streak = 0;
        }
        break;
      }
      dt *= 0.5;
      streak = 0;
      require(dt > 1e-14, ErrorCode::NonConvergence, "gradient-flow step collapsed");
    }
  }
  require(residual < options.tol, ErrorCode::NonConvergence,
          "GP residual " + std::to_string(residual) + " after " + std::to_string(it) + " iterations");
  // Fix the global phase so that φ is positive.
  if (c.sum() < 0) c = -c;
  GPState s = make_state(trap, a0, mesh, c);
  s.iterations = it;
  s.energy_history = std::move(history);
  require(s.boundary_value <= options.boundary_tolerance, ErrorCode::BoxTooSmall,
          "|φ| on the boundary is " + std::to_string(s.boundary_value));
  return s;
}

double chemical_potential(const GPState& s) {
  if (s.torus()) return 8 * kPi * s.a0;
  const Problem p = setup(s.trap, s.a0, s.mesh);
  const Eigen::VectorXd c2 = s.coefficients.cwiseAbs2();
  return s.mesh->kinetic_energy(s.coefficients) + p.V.dot(c2) + p.g * c2.cwiseAbs2().cwiseQuotient(p.w).sum();
}

double rayleigh_quotient(const GPState& s) {
  if (s.torus()) return 8 * kPi * s.a0;
  const Problem p = setup(s.trap, s.a0, s.mesh);
  const Eigen::VectorXd& c = s.coefficients;
  return c.dot(p.apply(c, p.local(c))) / c.squaredNorm();
}

double gp_energy(const GPState& s) {
  if (s.torus()) return 4 * kPi * s.a0;
  return setup(s.trap, s.a0, s.mesh).energy(s.coefficients);
}

double gp_residual(const GPState& s) {
  if (s.torus()) return 0.0;
  const Problem p = setup(s.trap, s.a0, s.mesh);
  const Eigen::VectorXd& c = s.coefficients;
  return (p.apply(c, p.local(c)) - s.mu * c).norm();
}

double quartic_integral(const GPState& s) {
  if (s.torus()) return 1.0;
  return (s.mesh->weights().array() * s.phi.array().pow(4)).sum();
}

double thomas_fermi_mu(double a0, double omega) { return std::pow(omega, 1.2) * std::pow(15 * a0, 0.4); }

namespace {

// v(r) = √(4π) r φ(r) as a cubic Hermite interpolant with spectral slopes,
// including the Dirichlet endpoints.
HermiteInterpolant radial_amplitude(const GPState& s) {
  const Kinetic1D& ax = s.mesh->axis();
  const int n = ax.n;
  const Eigen::VectorXd v = s.coefficients / std::sqrt(ax.h);
  const Eigen::VectorXd dv = ax.first_derivative * v;
  const Eigen::VectorXd hat = ax.S * v;
  const double norm = std::sqrt(2.0 / (n + 1));
  double d0 = 0, d1 = 0;
  for (int k = 0; k < n; ++k) {
    const double kk = (k + 1) * kPi / (ax.b - ax.a);
    d0 += norm * kk * hat(k);
    d1 += norm * kk * hat(k) * ((k % 2) ? 1.0 : -1.0);
  }
  std::vector<double> x{0.0}, y{0.0}, dy{d0};
  for (int j = 0; j < n; ++j) {
    x.push_back(ax.nodes(j));
    y.push_back(v(j));
    dy.push_back(dv(j));
  }
  x.push_back(ax.b);
  y.push_back(0.0);
  dy.push_back(d1);
  return HermiteInterpolant(x, y, dy);
}

std::vector<double> pieces(double a, double b, const std::vector<double>& breaks) {
  std::vector<double> edges{a};
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

Eigen::VectorXd convolve_density(const GPState& s, const std::function<double(double)>& kernel, double a, double b,
                                 const std::vector<double>& breaks) {
  const std::vector<double> edges = pieces(a, b, breaks);
  Quadrature tq;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const Quadrature g = composite_gauss(edges[k], edges[k + 1], 4, 8);
    tq.nodes.insert(tq.nodes.end(), g.nodes.begin(), g.nodes.end());
    tq.weights.insert(tq.weights.end(), g.weights.begin(), g.weights.end());
  }
  std::vector<double> kt(tq.size());
  for (std::size_t q = 0; q < tq.size(); ++q) kt[q] = 4 * kPi * tq.nodes[q] * tq.nodes[q] * kernel(tq.nodes[q]);
  if (s.torus()) {
    double total = 0;
    for (std::size_t q = 0; q < tq.size(); ++q) total += tq.weights[q] * kt[q];
    return Eigen::VectorXd::Constant(1, total);
  }
  require(s.mesh->radial(), ErrorCode::InvalidArgument, "density convolution needs a radial or torus state");
  const HermiteInterpolant v = radial_amplitude(s);
  const double R = s.mesh->axis().b, h = s.mesh->spacing();
  // s φ²(s) = v(s)² / (4π s), zero beyond the wall.
  auto density_moment = [&](double x) {
    if (x <= 0 || x >= R) return 0.0;
    const double vv = v.value(x);
    return vv * vv / (4 * kPi * x);
  };
  const Eigen::VectorXd& r = s.mesh->radii();
  Eigen::VectorXd out(r.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    double acc = 0.0;
    for (std::size_t q = 0; q < tq.size(); ++q) {
      const double t = tq.nodes[q];
      const double lo = std::abs(r(j) - t), hi = std::min(r(j) + t, R);
      if (hi <= lo) continue;
      const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
      const Quadrature sq = composite_gauss(lo, hi, panels, 4);
      const double mean = sq.integrate(density_moment) / (2 * r(j) * t);
      acc += tq.weights[q] * kt[q] * mean;
    }
    out(j) = acc;
  }
  return out;
}

double integrate_against_density(const GPState& s, const Eigen::VectorXd& g) {
  if (s.torus()) return g(0);
  return (s.mesh->weights().array() * g.array() * s.phi.array().square()).sum();
}

DiluteReport dilute_limit_check(const ScatteringSolution& sol, const GPState& state, const std::vector<double>& N_list) {
  require(!state.torus() && state.mesh->radial(), ErrorCode::InvalidArgument,
          "dilute-limit check needs a radial trapped state");
  DiluteReport rep;
  const RadialPotential& V = sol.potential;
  const double R0 = V.support_radius();
  for (double N : N_list) {
    require(state.mesh->spacing() <= 1.0 / N, ErrorCode::UnderresolvedGrid,
            "grid spacing " + std::to_string(state.mesh->spacing()) + " is coarser than 1/N");
    double dev = 0.0;
    if (!V.is_zero()) {
      auto kernel = [&](double t) { return N * N * N * V(N * t) * sol.f_at(N * t); };
      const Eigen::VectorXd conv = convolve_density(state, kernel, 0.0, R0 / N);
      const Eigen::VectorXd d = conv - 8 * kPi * sol.a0 * state.phi.cwiseAbs2();
      dev = std::sqrt((state.mesh->weights().array() * d.array().square()).sum());
    }
    rep.rows.push_back({N, dev});
  }
  const bool defined = rep.rows.size() >= 2 && std::all_of(rep.rows.begin(), rep.rows.end(),
                                                            [](const DiluteRow& r) { return r.deviation > 0; });
  if (defined) {
    std::vector<double> x, y;
    for (const auto& row : rep.rows) {
      x.push_back(std::log(row.N));
      y.push_back(std::log(row.deviation));
    }
    rep.exponent = fit_slope(x, y);
    rep.pass = std::abs(*rep.exponent + 2.0) <= 0.2;
  } else {
    rep.pass = V.is_zero();
  }
  return rep;
}

}  // namespace bogo
