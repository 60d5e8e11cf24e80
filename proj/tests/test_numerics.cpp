#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dwc/quadrature.hpp"
#include "dwc/spectral.hpp"

using namespace dwc;

TEST(GaussLegendre, ExactOnPolynomialsUpToDegree2nMinus1) {
  for (int n : {1, 2, 5, 16, 64}) {
    const QuadratureRule r = gauss_legendre(n, -0.5, 2.0);
    EXPECT_NEAR(r.weights.sum(), 2.5, 1e-13);
    const int d = 2 * n - 1;
    const double exact = (std::pow(2.0, d + 1) - std::pow(-0.5, d + 1)) / (d + 1);
    EXPECT_NEAR(r.integrate(r.nodes.array().pow(d).matrix()), exact, 1e-12 * std::max(1.0, std::abs(exact)));
    for (int i = 1; i < n; ++i) EXPECT_LT(r.nodes(i - 1), r.nodes(i));
  }
  EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
}

TEST(GaussLegendre, GaussianIntegral) {
  const QuadratureRule r = gauss_legendre(80, -10.0, 10.0);
  EXPECT_NEAR(r.integrate((-r.nodes.array().square()).exp().matrix()), std::sqrt(std::numbers::pi), 1e-13);
}

TEST(Trapezoid, SpectralForPeriodicData) {
  const QuadratureRule r = periodic_trapezoid(32, 2.0 * std::numbers::pi);
  const Eigen::VectorXd f = r.nodes.array().cos().exp().matrix();
  EXPECT_NEAR(r.integrate(f), 2.0 * std::numbers::pi * std::cyl_bessel_i(0.0, 1.0), 1e-13);
}

TEST(LagrangeDifferentiation, ExactOnPolynomials) {
  const QuadratureRule r = gauss_legendre(12, -3.0, 3.0);
  const Eigen::MatrixXd d = lagrange_differentiation(r.nodes);
  const Eigen::VectorXd f = r.nodes.array().pow(5) - 2.0 * r.nodes.array().square();
  const Eigen::VectorXd df = 5.0 * r.nodes.array().pow(4) - 4.0 * r.nodes.array();
  EXPECT_LT((d * f - df).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Periodic, DerivativeAndInterpolation) {
  const int n = 64;
  const double period = 3.0;
  Eigen::VectorXcd f(n), df(n);
  for (int k = 0; k < n; ++k) {
    const double t = period * k / n, w = 2.0 * std::numbers::pi / period;
    f(k) = std::exp(std::sin(w * t)) + std::complex<double>(0.0, 1.0) * std::cos(3.0 * w * t);
    df(k) = w * std::cos(w * t) * std::exp(std::sin(w * t)) - std::complex<double>(0.0, 3.0 * w) * std::sin(3.0 * w * t);
  }
  EXPECT_LT((periodic_derivative(f, period) - df).cwiseAbs().maxCoeff(), 1e-10);
  const PeriodicInterpolant p(f, period);
  const double t = 0.713, w = 2.0 * std::numbers::pi / period;
  const std::complex<double> exact = std::exp(std::sin(w * t)) + std::complex<double>(0.0, 1.0) * std::cos(3.0 * w * t);
  EXPECT_LT(std::abs(p(t) - exact), 1e-12);
  EXPECT_LT(std::abs(p(period * 5 / n) - f(5)), 1e-13);
  const Eigen::MatrixXd d = periodic_differentiation_matrix(n, period);
  EXPECT_LT((d.cast<std::complex<double>>() * f - df).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(NormalizedLegendre, OrthonormalUnderGaussLegendre) {
  const int lmax = 10;
  const QuadratureRule r = gauss_legendre(lmax + 1);
  for (int m = 0; m <= 3; ++m) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(lmax + 1, lmax + 1);
    Eigen::VectorXd p;
    for (int i = 0; i < r.nodes.size(); ++i) {
      normalized_legendre(lmax, m, r.nodes(i), p);
      gram += r.weights(i) * p * p.transpose();
    }
    EXPECT_LT((gram.bottomRightCorner(lmax + 1 - m, lmax + 1 - m) -
               Eigen::MatrixXd::Identity(lmax + 1 - m, lmax + 1 - m)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(NormalizedLegendre, ThetaDerivativeMatchesFiniteDifference) {
  const int lmax = 8;
  const double theta = 0.9, h = 1e-6;
  for (int m = 0; m <= lmax; ++m) {
    Eigen::VectorXd p, dp, pp, pm;
    normalized_legendre(lmax, m, std::cos(theta), p, &dp);
    normalized_legendre(lmax, m, std::cos(theta + h), pp);
    normalized_legendre(lmax, m, std::cos(theta - h), pm);
    EXPECT_LT((dp - (pp - pm) / (2.0 * h)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(SphereSpectral, RoundTripAndGradient) {
  const SphereSpectral grid(12, 24);
  const int total = grid.n_theta() * grid.n_phi();
  Eigen::VectorXcd f(total), fth(total), fph(total);
  for (int i = 0; i < grid.n_theta(); ++i)
    for (int j = 0; j < grid.n_phi(); ++j) {
      const double t = grid.cos_theta()(i), s = std::sqrt(1 - t * t), a = grid.azimuth(j);
      const double x = s * std::cos(a), y = s * std::sin(a), z = t;
      const int k = i * grid.n_phi() + j;
      // f = x z + y^3 in Cartesian coordinates on the unit sphere.
      f(k) = x * z + y * y * y;
      fth(k) = t * std::cos(a) * z + x * (-s) + 3 * y * y * (t * std::sin(a));
      fph(k) = -s * std::sin(a) * z + 3 * y * y * (s * std::cos(a));
    }
  const Eigen::MatrixXcd a = grid.analyze(f);
  EXPECT_LT((grid.synthesize(a) - f).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((grid.d_theta(a) - fth).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT((grid.d_phi(a) - fph).cwiseAbs().maxCoeff(), 1e-11);
  const double t = 0.3, phi = 2.1, s = std::sqrt(1 - t * t);
  EXPECT_LT(std::abs(grid.evaluate(a, t, phi) - (s * std::cos(phi) * t + std::pow(s * std::sin(phi), 3))), 1e-12);
}
