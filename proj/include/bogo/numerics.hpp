#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace bogo {

inline constexpr double kPi = 3.14159265358979323846;

/// Nodes and weights for ∫_a^b g(r) dr ≈ Σ w_j g(r_j).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double integrate(const std::function<double(double)>& g) const;
};

/// Gauss–Legendre rule on [a, b] (Newton iteration on P_n).
Quadrature gauss_legendre(double a, double b, int n);

/// Composite Gauss–Legendre with `panels` equal panels of `order` nodes each.
Quadrature composite_gauss(double a, double b, int panels, int order);

/// Composite Simpson on a uniform grid with an even number of intervals.
Quadrature simpson_uniform(double a, double b, int intervals);

/// Simpson in the variable log r, so nodes are geometrically spaced on [a, b], a > 0.
Quadrature simpson_log(double a, double b, int intervals);

/// Concatenates rules on adjacent intervals, fusing a shared endpoint.
Quadrature join(const Quadrature& left, const Quadrature& right);

/// Piecewise cubic Hermite interpolant through (x_j, y_j) with slopes d_j.
class HermiteInterpolant {
 public:
  HermiteInterpolant() = default;
  HermiteInterpolant(std::vector<double> x, std::vector<double> y, std::vector<double> dy);

  double value(double t) const;
  double derivative(double t) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t segment(double t) const;
  std::vector<double> x_, y_, dy_;
};

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares fit log y = c + α log N + β log ℓ; returns (α, β).
std::pair<double, double> fit_two_exponents(const std::vector<double>& N, const std::vector<double>& ell,
                                            const std::vector<double>& values);

/// Symmetric eigendecomposition A = U diag(λ) Uᵀ with eigenvalues ascending.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  explicit SymmetricEigen(const Eigen::MatrixXd& a);
  /// U f(Λ) Uᵀ, symmetrized.
  Eigen::MatrixXd apply(const std::function<double(double)>& f) const;
};

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

double max_abs(const Eigen::MatrixXd& a);
double symmetry_defect(const Eigen::MatrixXd& a);

/// Legendre polynomial P_l(t) by the three-term recurrence.
double legendre(int l, double t);

/// sin(x)/x with the series near zero.
double sinc(double x);

}  // namespace bogo
