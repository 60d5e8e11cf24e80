#pragma once

#include <Eigen/Dense>

namespace dwc {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  double integrate(const Eigen::VectorXd& values) const { return weights.dot(values); }
};

/// n-point Gauss-Legendre rule mapped to [a, b]; nodes ascending.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Equispaced periodic trapezoid rule on [0, period) starting at offset.
QuadratureRule periodic_trapezoid(int n, double period, double offset = 0.0);

/// Normalized Legendre value P_n(x) and derivative, by the three-term recurrence.
void legendre_with_derivative(int n, double x, double& p, double& dp);

/// Derivative matrix of the Lagrange interpolant through the given nodes.
Eigen::MatrixXd lagrange_differentiation(const Eigen::VectorXd& nodes);

}  // namespace dwc
