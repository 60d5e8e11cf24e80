#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "dwc/geometry.hpp"
#include "dwc/symbol.hpp"

namespace dwc {

/// P(x) exp(-a |x|^2) with complex polynomial P: closed-form gradient, Laplacian,
/// inner products and unitary Fourier transform.
class GaussPoly {
 public:
  using Poly = std::map<std::vector<int>, std::complex<double>>;

  GaussPoly(std::size_t n, double a, Poly p);
  static GaussPoly gaussian(std::size_t n, double a, std::complex<double> c = 1.0);
  /// P from a position-only symbol.
  static GaussPoly from_symbol(const PolySymbol& p, double a);

  std::size_t dimension() const { return n_; }
  double exponent() const { return a_; }
  const Poly& poly() const { return p_; }

  std::complex<double> value(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd gradient(const Eigen::VectorXd& x) const;
  /// (2 pi)^(-n/2) int u(x) exp(-i <x, xi>) dx.
  std::complex<double> fourier(const Eigen::VectorXd& xi) const;

  GaussPoly laplacian() const;
  GaussPoly times(const PolySymbol& q) const;
  GaussPoly scaled(std::complex<double> c) const;

  /// int conj(u) v over R^n.
  std::complex<double> inner(const GaussPoly& v) const;
  double l2_norm() const { return std::sqrt(inner(*this).real()); }

  TestFunction as_test_function() const;

 private:
  std::size_t n_;
  double a_;
  Poly p_;
  // fourier_factors_[m] holds the coefficients of Q_m with
  // FT[x^m exp(-a x^2)](k) = Q_m(k) (2a)^(-1/2) exp(-k^2 / (4a)).
  std::vector<std::vector<std::complex<double>>> fourier_factors_;
};

/// Fourier transform by direct summation on a uniform box grid (n = 2 only).
struct DftConfig {
  double half_width = 8.0;
  int nodes_per_axis = 96;
};

class DftFourier {
 public:
  DftFourier(const std::function<std::complex<double>(const Eigen::VectorXd&)>& u, const DftConfig& cfg);
  std::complex<double> operator()(const Eigen::VectorXd& xi) const;
  /// |full-resolution transform - half-resolution transform| at xi.
  double error_estimate(const Eigen::VectorXd& xi) const;

 private:
  struct Samples {
    Samples() = default;
    Samples(const std::function<std::complex<double>(const Eigen::VectorXd&)>& u, double half_width, int m);
    std::complex<double> transform(const Eigen::VectorXd& xi) const;
    double cell = 0.0;
    Eigen::MatrixXd points;
    Eigen::VectorXcd values;
  };
  DftConfig cfg_;
  Samples fine_, coarse_;
};

}  // namespace dwc
