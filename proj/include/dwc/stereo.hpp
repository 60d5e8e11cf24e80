#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace dwc {

/// Stereographic chart of the sphere |z| = r projected from the pole w onto the plane w^perp
/// through the origin; the antipode -w maps to chart coordinate 0.
class StereoChart {
 public:
  StereoChart(const Eigen::VectorXd& pole, double radius);

  int chart_dimension() const { return static_cast<int>(basis_.cols()); }
  const Eigen::VectorXd& pole() const { return pole_; }
  /// Orthonormal basis of w^perp, one column per chart coordinate.
  const Eigen::MatrixXd& basis() const { return basis_; }
  double radius() const { return std::sqrt(lambda_); }

  /// Psi(z) = lambda P(z) / (lambda - <z, w>), P the projection onto w^perp.
  Eigen::VectorXd forward(const Eigen::VectorXd& z) const;
  /// Upsilon(c) = 2 lambda / (|c|^2 + lambda) (c - w) + w.
  Eigen::VectorXd inverse(const Eigen::VectorXd& c) const;
  /// Columns d Upsilon / d c_j.
  Eigen::MatrixXd inverse_jacobian(const Eigen::VectorXd& c) const;
  /// sqrt(det g) = (2 lambda / (lambda + |c|^2))^(n-1).
  double density(const Eigen::VectorXd& c) const;

 private:
  Eigen::VectorXd pole_;
  Eigen::MatrixXd basis_;
  double lambda_;
};

/// Integral of the chart density over the whole chart line for the circle of radius r,
/// by Gauss-Legendre after t = s / (1 - s^2). Equals the circumference 2 pi r.
double chart_circumference(double radius, int nodes);

/// The same integral with the squared-denominator variant (2 lambda / (lambda + t^2)^2)^(n-1).
/// It does not reproduce the circumference; the report keeps it as the rejected form.
double chart_circumference_printed(double radius, int nodes);

}  // namespace dwc
