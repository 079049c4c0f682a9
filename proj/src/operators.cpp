#include "bogo/operators.hpp"

#include "bogo/error.hpp"
#include "bogo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bogo {

namespace {

void check_pairing(const Basis& b, const GPState& s) {
  if (b.kind() == BasisKind::PlaneWaveTorus) {
    require(s.torus(), ErrorCode::GridMismatch, "plane-wave basis needs the torus state");
    return;
  }
  require(!s.torus() && same_discretization(b.mesh()->discretization(), s.discretization), ErrorCode::GridMismatch,
          "basis mesh differs from the state's discretization");
  if (b.projected())
    require((b.condensate() - s.coefficients.normalized()).norm() < 1e-10, ErrorCode::GridMismatch,
            "basis was projected against a different condensate");
}

// Nodal φ(x_i) φ(x_j) kernel samples for a grid basis: the full-coordinate
// matrix of the integral operator with kernel φ(x) k(|x − y|) φ(y).
// `support` bounds |x − y|; `breaks` mark points where k is not smooth.
Eigen::MatrixXd nodal_kernel(const Basis& b, const GPState& s, const std::function<double(double)>& k,
                             double lo_cut, double hi_cut, const std::vector<double>& breaks) {
  const Mesh& mesh = *b.mesh();
  const std::size_t n = mesh.size();
  const double h = mesh.spacing();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (!mesh.radial()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double d = (mesh.point(i) - mesh.point(j)).norm();
        if (d < lo_cut || d >= hi_cut) continue;
        out(i, j) = out(j, i) = h * h * h * s.phi(i) * s.phi(j) * k(d);
      }
    return out;
  }
  // Partial wave l: 2π h φ_i φ_j ∫ k(ρ) P_l(t) ρ dρ over |r − r'| ≤ ρ ≤ r + r',
  // t = (r² + r'² − ρ²)/(2 r r').
  const int l = b.angular_momentum();
  const Eigen::VectorXd& r = mesh.radii();
  const Quadrature unit = gauss_legendre(0.0, 1.0, 8);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double lo = std::max(std::abs(r(i) - r(j)), lo_cut), hi = std::min(r(i) + r(j), hi_cut);
      if (hi <= lo) {
        if (r(j) - r(i) >= hi_cut) break;
        continue;
      }
      std::vector<double> edges{lo};
      for (double x : breaks)
        if (x > lo && x < hi) edges.push_back(x);
      edges.push_back(hi);
      double g = 0.0;
      for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e], len = edges[e + 1] - edges[e];
        for (std::size_t q = 0; q < unit.size(); ++q) {
          const double rho = a + len * unit.nodes[q];
          const double t = std::clamp((r(i) * r(i) + r(j) * r(j) - rho * rho) / (2 * r(i) * r(j)), -1.0, 1.0);
          g += len * unit.weights[q] * k(rho) * legendre(l, t) * rho;
        }
      }
      out(i, j) = out(j, i) = 2 * kPi * h * s.phi(i) * s.phi(j) * g;
    }
  return out;
}

void check_kernel_resolution(const Basis& b, const TruncatedScattering& t) {
  if (b.kind() == BasisKind::PlaneWaveTorus) return;
  require(b.mesh()->spacing() <= t.ell() / 16 * (1 + 1e-12), ErrorCode::UnderresolvedKernel,
          "grid spacing " + std::to_string(b.mesh()->spacing()) + " exceeds ℓ/16 = " + std::to_string(t.ell() / 16));
}

Eigen::MatrixXd torus_diagonal(const Basis& b, const std::function<double(double)>& symbol) {
  std::map<long, double> cache;
  const std::size_t n = b.dimension();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d& p = b.momenta()[i];
    const long key = std::lround(p.squaredNorm() / (4 * kPi * kPi));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, symbol(p.norm())).first;
    out(i, i) = it->second;
  }
  return out;
}

}  // namespace

double eps_hat(const TruncatedScattering& t, double p) {
  if (t.solution().potential.is_zero()) return 0.0;
  const int panels = std::max(8, static_cast<int>(std::ceil(p * t.ell())));
  return composite_gauss(t.ell() / 2, t.ell(), panels, 8).integrate([&](double r) {
    return 4 * kPi * r * r * t.eps_scaled(r) * sinc(p * r);
  });
}

double omega_hat(const TruncatedScattering& t, double p) {
  const double R0 = t.solution().potential.support_radius();
  if (R0 == 0) return 0.0;
  const double edges[4] = {0.0, R0 / t.N(), t.ell() / 2, t.ell()};
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const int panels = std::max(4, static_cast<int>(std::ceil(p * (edges[e + 1] - edges[e]))));
    total += composite_gauss(edges[e], edges[e + 1], panels, 8).integrate([&](double r) {
      return 4 * kPi * r * r * t.omega(r) * sinc(p * r);
    });
  }
  return total;
}

double correlation_hs_norm(const GPState& state, const TruncatedScattering& t) {
  const double R0 = t.solution().potential.support_radius();
  if (R0 == 0) return 0.0;
  const double N = t.N();
  const Eigen::VectorXd c = convolve_density(
      state, [&](double r) { return N * N * t.omega(r) * t.omega(r); }, 0.0, t.ell(), {R0 / N, t.ell() / 2});
  return std::sqrt(integrate_against_density(state, c));
}

OperatorMatrix assemble_D(const BasisPtr& basis, const GPState& state) {
  check_pairing(*basis, state);
  OperatorMatrix D{basis, {}, "D"};
  const double g = state.coupling();
  if (basis->kind() == BasisKind::PlaneWaveTorus) {
    const std::size_t n = basis->dimension();
    D.entries = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) D.entries(i, i) = basis->momenta()[i].squaredNorm() + g - state.mu;
  } else {
    const Mesh& mesh = *basis->mesh();
    Eigen::MatrixXd full = mesh.kinetic_matrix(basis->angular_momentum());
    for (std::size_t j = 0; j < mesh.size(); ++j)
      full(j, j) += state.trap(mesh.point(j)) + g * state.phi(j) * state.phi(j) - state.mu;
    D.entries = symmetrize(basis->restrict(full));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(D.entries);
  require(llt.info() == Eigen::Success, ErrorCode::NonPositiveD,
          "D is not positive definite on the excitation space (" + basis->describe() + ")");
  return D;
}

OperatorMatrix assemble_K_limit(const BasisPtr& basis, const GPState& state) {
  check_pairing(*basis, state);
  OperatorMatrix K{basis, {}, "K_inf"};
  const double g = state.coupling();
  if (basis->kind() == BasisKind::PlaneWaveTorus) {
    K.entries = g * Eigen::MatrixXd::Identity(basis->dimension(), basis->dimension());
  } else {
    const Eigen::VectorXd diag = g * state.phi.cwiseAbs2();
    K.entries = symmetrize(basis->restrict(diag.asDiagonal().toDenseMatrix()));
  }
  return K;
}

OperatorMatrix assemble_K_smeared(const BasisPtr& basis, const GPState& state, const TruncatedScattering& trunc) {
  check_pairing(*basis, state);
  check_kernel_resolution(*basis, trunc);
  OperatorMatrix K{basis, {}, "K"};
  if (basis->kind() == BasisKind::PlaneWaveTorus) {
    K.entries = torus_diagonal(*basis, [&](double p) { return eps_hat(trunc, p); });
    return K;
  }
  const double ell = trunc.ell();
  const Eigen::MatrixXd full = nodal_kernel(
      *basis, state, [&](double rho) { return trunc.eps_scaled(rho); }, ell / 2, ell, {});
  K.entries = symmetrize(basis->restrict(full));
  return K;
}

OperatorMatrix assemble_kinetic(const BasisPtr& basis) {
  OperatorMatrix T{basis, {}, "kinetic"};
  if (basis->kind() == BasisKind::PlaneWaveTorus) {
    const std::size_t n = basis->dimension();
    T.entries = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) T.entries(i, i) = basis->momenta()[i].squaredNorm();
  } else {
    T.entries = symmetrize(basis->restrict(basis->mesh()->kinetic_matrix(basis->angular_momentum())));
  }
  return T;
}

CorrelationKernel assemble_s1(const BasisPtr& basis, const GPState& state, const TruncatedScattering& trunc) {
  check_pairing(*basis, state);
  check_kernel_resolution(*basis, trunc);
  CorrelationKernel s;
  s.N = trunc.N();
  s.ell = trunc.ell();
  s.matrix = OperatorMatrix{basis, {}, "s1"};
  const double N = trunc.N();
  if (basis->kind() == BasisKind::PlaneWaveTorus) {
    s.matrix.entries = torus_diagonal(*basis, [&](double p) { return -N * omega_hat(trunc, p); });
    s.unprojected = s.matrix.entries;
  } else {
    const double R0 = trunc.solution().potential.support_radius();
    s.unprojected = nodal_kernel(
        *basis, state, [&](double rho) { return -N * trunc.omega(rho); }, 0.0, trunc.ell(),
        {R0 / N, trunc.ell() / 2});
    s.matrix.entries = basis->restrict(s.unprojected);
  }
  s.slot_symmetry_defect = s.matrix.symmetry_defect();
  s.matrix.entries = symmetrize(s.matrix.entries);
  const Eigen::MatrixXd& S = s.matrix.entries;
  s.hs_norm = S.norm();
  if (basis->kind() == BasisKind::PlaneWaveTorus) {
    const Eigen::VectorXd d = S.diagonal();
    const Eigen::VectorXd p2 = assemble_kinetic(basis).entries.diagonal();
    s.op_norm = d.cwiseAbs().maxCoeff();
    s.grad_op_norm = std::sqrt((p2.array() * d.array().square()).maxCoeff());
    s.grad_hs_norm = std::sqrt((p2.array() * d.array().square()).sum());
  } else {
    const SymmetricEigen es(S);
    s.op_norm = std::max(std::abs(es.values(0)), std::abs(es.values(es.values.size() - 1)));
    const Eigen::MatrixXd T = assemble_kinetic(basis).entries;
    const Eigen::MatrixXd STS = symmetrize(S * T * S);
    s.grad_hs_norm = std::sqrt(std::max(0.0, STS.trace()));
    s.grad_op_norm = std::sqrt(std::max(0.0, SymmetricEigen(STS).values.maxCoeff()));
  }
  return s;
}

double projection_defect_constant(const CorrelationKernel& s1, const GPState& state, double floor) {
  const Basis& b = *s1.matrix.basis;
  require(b.kind() == BasisKind::RadialChannel && b.angular_momentum() == 0, ErrorCode::InvalidArgument,
          "pointwise projection defect is defined on the s-wave channel");
  const Eigen::MatrixXd diff = s1.matrix.embedded() - s1.unprojected;
  const Eigen::VectorXd& r = b.mesh()->radii();
  const double h = b.mesh()->spacing();
  const double pmax = state.phi.maxCoeff();
  double c = 0.0;
  for (Eigen::Index i = 0; i < diff.rows(); ++i)
    for (Eigen::Index j = 0; j < diff.cols(); ++j) {
      const double pp = state.phi(i) * state.phi(j);
      if (pp < floor * pmax * pmax) continue;
      const double pointwise = diff(i, j) / (4 * kPi * h * r(i) * r(j));
      c = std::max(c, std::abs(pointwise) / (s1.ell * s1.ell * pp));
    }
  return c;
}

}  // namespace bogo
