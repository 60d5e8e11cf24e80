#include "dwc/stereo.hpp"

#include <cmath>

#include "dwc/quadrature.hpp"

namespace dwc {

StereoChart::StereoChart(const Eigen::VectorXd& pole, double radius) : pole_(pole), lambda_(radius * radius) {
  if (pole.size() < 2) throw std::invalid_argument("stereographic chart needs ambient dimension >= 2");
  if (std::abs(pole.norm() - radius) > 1e-10 * std::max(1.0, radius))
    throw std::invalid_argument("pole must lie on the sphere");
  const Eigen::Index n = pole.size();
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(pole).householderQ() * Eigen::MatrixXd::Identity(n, n);
  basis_ = q.rightCols(n - 1);
}

Eigen::VectorXd StereoChart::forward(const Eigen::VectorXd& z) const {
  const double denom = lambda_ - z.dot(pole_);
  if (std::abs(denom) < 1e-14 * lambda_) throw std::domain_error("stereographic chart evaluated at its pole");
  return lambda_ * (basis_.transpose() * z) / denom;
}

Eigen::VectorXd StereoChart::inverse(const Eigen::VectorXd& c) const {
  const double scale = 2.0 * lambda_ / (c.squaredNorm() + lambda_);
  return scale * (basis_ * c - pole_) + pole_;
}

Eigen::MatrixXd StereoChart::inverse_jacobian(const Eigen::VectorXd& c) const {
  const double scale = 2.0 * lambda_ / (c.squaredNorm() + lambda_);
  const Eigen::VectorXd offset = basis_ * c - pole_;
  Eigen::MatrixXd j = scale * basis_;
  for (Eigen::Index k = 0; k < c.size(); ++k) j.col(k) += (-scale * scale * c(k) / lambda_) * offset;
  return j;
}

double StereoChart::density(const Eigen::VectorXd& c) const {
  return std::pow(2.0 * lambda_ / (lambda_ + c.squaredNorm()), static_cast<double>(chart_dimension()));
}

namespace {

template <class Density>
double whole_line_integral(int nodes, Density&& density) {
  const QuadratureRule gl = gauss_legendre(nodes);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < gl.nodes.size(); ++i) {
    const double s = gl.nodes(i);
    const double t = s / (1.0 - s * s);
    const double dt = (1.0 + s * s) / ((1.0 - s * s) * (1.0 - s * s));
    sum += gl.weights(i) * density(t) * dt;
  }
  return sum;
}

}  // namespace

double chart_circumference(double radius, int nodes) {
  const StereoChart chart(Eigen::Vector2d(0.0, radius), radius);
  return whole_line_integral(nodes, [&](double t) { return chart.density(Eigen::VectorXd::Constant(1, t)); });
}

double chart_circumference_printed(double radius, int nodes) {
  const double lambda = radius * radius;
  return whole_line_integral(nodes, [&](double t) { return 2.0 * lambda / std::pow(lambda + t * t, 2); });
}

}  // namespace dwc
