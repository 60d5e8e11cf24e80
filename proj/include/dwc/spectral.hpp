#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dwc {

/// Trigonometric interpolant of samples taken at t_k = period * k / N.
class PeriodicInterpolant {
 public:
  PeriodicInterpolant(const Eigen::VectorXcd& samples, double period);

  std::complex<double> operator()(double t) const;
  /// Spectral derivative at the sample points.
  Eigen::VectorXcd derivative() const;
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

 private:
  Eigen::VectorXcd coeffs_;  // DFT order, scaled by 1/N
  double period_;
};

/// Spectral derivative of periodic samples.
Eigen::VectorXcd periodic_derivative(const Eigen::VectorXcd& samples, double period);

/// Dense matrix of periodic_derivative on N points.
Eigen::MatrixXd periodic_differentiation_matrix(int n, double period);

/// Spherical-harmonic transform on a Gauss-Legendre (in cos theta) by uniform-azimuth grid.
/// Node (i, j) sits at cos theta = t_i, azimuth 2 pi j / n_phi, flattened as i * n_phi + j.
class SphereSpectral {
 public:
  SphereSpectral(int n_theta, int n_phi);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int degree() const { return lmax_; }
  const Eigen::VectorXd& cos_theta() const { return t_; }
  const Eigen::VectorXd& t_weights() const { return wt_; }
  double azimuth(int j) const;

  /// Coefficients a(l, m + mmax) of sum a_lm Pbar_l^|m|(cos theta) e^{i m phi}.
  Eigen::MatrixXcd analyze(const Eigen::VectorXcd& values) const;
  Eigen::VectorXcd synthesize(const Eigen::MatrixXcd& a) const;
  Eigen::VectorXcd d_theta(const Eigen::MatrixXcd& a) const;
  Eigen::VectorXcd d_phi(const Eigen::MatrixXcd& a) const;
  std::complex<double> evaluate(const Eigen::MatrixXcd& a, double cos_theta, double phi) const;

 private:
  int n_theta_, n_phi_, lmax_, mmax_;
  Eigen::VectorXd t_, wt_;
  std::vector<Eigen::MatrixXd> pbar_;   // per |m|: (lmax+1) x n_theta
  std::vector<Eigen::MatrixXd> dpbar_;  // d/dtheta of the above
};

/// Orthonormal associated Legendre functions Pbar_l^m(t), l = m..lmax, with
/// integral over [-1, 1] of Pbar^2 equal to one. Also fills d/dtheta when dtheta is non-null.
void normalized_legendre(int lmax, int m, double t, Eigen::VectorXd& p, Eigen::VectorXd* dtheta = nullptr);

}  // namespace dwc
