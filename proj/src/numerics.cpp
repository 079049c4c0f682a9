#include "bogo/numerics.hpp"

#include "bogo/error.hpp"

#include <algorithm>
#include <cmath>

namespace bogo {

double Quadrature::integrate(const std::function<double(double)>& g) const {
  double s = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * g(nodes[j]);
  return s;
}

namespace {

// Returns (P_n(x), P_n'(x)).
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

Quadrature gauss_legendre(double a, double b, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss-Legendre order must be positive");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    q.nodes[i] = mid - half * x;
    q.nodes[n - 1 - i] = mid + half * x;
    q.weights[i] = q.weights[n - 1 - i] = half * 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

Quadrature composite_gauss(double a, double b, int panels, int order) {
  Quadrature q;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const Quadrature g = gauss_legendre(a + p * h, a + (p + 1) * h, order);
    q.nodes.insert(q.nodes.end(), g.nodes.begin(), g.nodes.end());
    q.weights.insert(q.weights.end(), g.weights.begin(), g.weights.end());
  }
  return q;
}

Quadrature simpson_uniform(double a, double b, int intervals) {
  require(intervals >= 2 && intervals % 2 == 0, ErrorCode::InvalidArgument,
          "Simpson needs an even number of intervals");
  Quadrature q;
  const double h = (b - a) / intervals;
  for (int j = 0; j <= intervals; ++j) {
    q.nodes.push_back(j == intervals ? b : a + j * h);
    const double c = (j == 0 || j == intervals) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    q.weights.push_back(c * h / 3.0);
  }
  return q;
}

Quadrature simpson_log(double a, double b, int intervals) {
  require(a > 0 && b > a, ErrorCode::InvalidArgument, "log-spaced Simpson needs 0 < a < b");
  Quadrature s = simpson_uniform(std::log(a), std::log(b), intervals);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double r = std::exp(s.nodes[j]);
    s.nodes[j] = r;
    s.weights[j] *= r;
  }
  s.nodes.front() = a;
  s.nodes.back() = b;
  return s;
}

Quadrature join(const Quadrature& left, const Quadrature& right) {
  if (left.size() == 0) return right;
  Quadrature q = left;
  std::size_t start = 0;
  if (right.size() > 0 && std::abs(right.nodes.front() - left.nodes.back()) <= 1e-14 * (1.0 + std::abs(left.nodes.back()))) {
    q.weights.back() += right.weights.front();
    start = 1;
  }
  q.nodes.insert(q.nodes.end(), right.nodes.begin() + start, right.nodes.end());
  q.weights.insert(q.weights.end(), right.weights.begin() + start, right.weights.end());
  return q;
}

HermiteInterpolant::HermiteInterpolant(std::vector<double> x, std::vector<double> y, std::vector<double> dy)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)) {
  require(x_.size() >= 2 && y_.size() == x_.size() && dy_.size() == x_.size(), ErrorCode::InvalidArgument,
          "Hermite interpolant needs matching arrays of length >= 2");
}

std::size_t HermiteInterpolant::segment(double t) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(k, x_.size() - 2);
}

double HermiteInterpolant::value(double t) const {
  const std::size_t k = segment(t);
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y_[k] + h10 * h * dy_[k] + h01 * y_[k + 1] + h11 * h * dy_[k + 1];
}

double HermiteInterpolant::derivative(double t) const {
  const std::size_t k = segment(t);
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
  return (d00 * y_[k] + d01 * y_[k + 1]) / h + d10 * dy_[k] + d11 * dy_[k + 1];
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::pair<double, double> fit_two_exponents(const std::vector<double>& N, const std::vector<double>& ell,
                                            const std::vector<double>& values) {
  Eigen::MatrixXd a(values.size(), 3);
  Eigen::VectorXd b(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::log(N[i]);
    a(i, 2) = std::log(ell[i]);
    b(i) = std::log(values[i]);
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  return {c(1), c(2)};
}

SymmetricEigen::SymmetricEigen(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a));
  require(es.info() == Eigen::Success, ErrorCode::NonConvergence, "symmetric eigensolver failed");
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

Eigen::MatrixXd SymmetricEigen::apply(const std::function<double(double)>& f) const {
  Eigen::VectorXd fv(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) fv(i) = f(values(i));
  return symmetrize(vectors * fv.asDiagonal() * vectors.transpose());
}

double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double symmetry_defect(const Eigen::MatrixXd& a) { return max_abs(a - a.transpose()); }

double legendre(int l, double t) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace bogo
