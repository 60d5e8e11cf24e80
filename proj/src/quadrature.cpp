#include "dwc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dwc {

void legendre_with_derivative(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      legendre_with_derivative(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_with_derivative(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(i) = mid - half * x;
    rule.nodes(n - 1 - i) = mid + half * x;
    rule.weights(i) = rule.weights(n - 1 - i) = half * w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = mid;
  return rule;
}

QuadratureRule periodic_trapezoid(int n, double period, double offset) {
  if (n < 1) throw std::invalid_argument("trapezoid rule needs at least one node");
  QuadratureRule rule{Eigen::VectorXd(n), Eigen::VectorXd::Constant(n, period / n)};
  for (int i = 0; i < n; ++i) rule.nodes(i) = offset + period * i / n;
  return rule;
}

Eigen::MatrixXd lagrange_differentiation(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd c = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) c(i) *= x(i) - x(j);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
    d(i, i) = -d.row(i).sum();
  }
  return d;
}

}  // namespace dwc
