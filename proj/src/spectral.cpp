#include "dwc/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "dwc/quadrature.hpp"

namespace dwc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed frequency of DFT slot k.
int frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

PeriodicInterpolant::PeriodicInterpolant(const Eigen::VectorXcd& samples, double period)
    : period_(period) {
  if (samples.size() == 0) throw std::invalid_argument("empty sample vector");
  Eigen::FFT<double> fft;
  fft.fwd(coeffs_, samples);
  coeffs_ /= static_cast<double>(samples.size());
}

std::complex<double> PeriodicInterpolant::operator()(double t) const {
  const int n = static_cast<int>(coeffs_.size());
  const double base = kTwoPi * t / period_;
  std::complex<double> s = 0.0;
  for (int k = 0; k < n; ++k) {
    const int f = frequency(k, n);
    if (n % 2 == 0 && k == n / 2) {
      s += coeffs_(k) * std::cos(f * base);
    } else {
      s += coeffs_(k) * std::polar(1.0, f * base);
    }
  }
  return s;
}

Eigen::VectorXcd PeriodicInterpolant::derivative() const {
  const int n = static_cast<int>(coeffs_.size());
  Eigen::VectorXcd spec(n);
  for (int k = 0; k < n; ++k) {
    const int f = frequency(k, n);
    spec(k) = (n % 2 == 0 && k == n / 2) ? 0.0 : coeffs_(k) * std::complex<double>(0.0, kTwoPi * f / period_);
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd out;
  fft.inv(out, spec);
  return out * static_cast<double>(n);
}

Eigen::VectorXcd periodic_derivative(const Eigen::VectorXcd& samples, double period) {
  return PeriodicInterpolant(samples, period).derivative();
}

Eigen::MatrixXd periodic_differentiation_matrix(int n, double period) {
  Eigen::MatrixXd d(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(j) = 1.0;
    d.col(j) = periodic_derivative(e, period).real();
  }
  return d;
}

void normalized_legendre(int lmax, int m, double t, Eigen::VectorXd& p, Eigen::VectorXd* dtheta) {
  p = Eigen::VectorXd::Zero(lmax + 1);
  if (m > lmax) {
    if (dtheta) *dtheta = Eigen::VectorXd::Zero(lmax + 1);
    return;
  }
  const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
  double pmm = std::sqrt(0.5);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  p(m) = pmm;
  if (m + 1 <= lmax) p(m + 1) = std::sqrt(2.0 * m + 3.0) * t * pmm;
  for (int l = m + 2; l <= lmax; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                               (4.0 * (l - 1) * (l - 1) - 1.0));
    p(l) = a * (t * p(l - 1) - b * p(l - 2));
  }
  if (!dtheta) return;
  if (s == 0.0) throw std::domain_error("theta derivative requested at a pole");
  *dtheta = Eigen::VectorXd::Zero(lmax + 1);
  for (int l = m; l <= lmax; ++l) {
    const double lower = l > m ? std::sqrt((2.0 * l + 1.0) * (l - m) * (l + m) / (2.0 * l - 1.0)) * p(l - 1) : 0.0;
    (*dtheta)(l) = (l * t * p(l) - lower) / s;
  }
}

SphereSpectral::SphereSpectral(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("sphere grid needs positive sizes");
  lmax_ = n_theta - 1;
  mmax_ = std::min(lmax_, (n_phi - 1) / 2);
  const QuadratureRule gl = gauss_legendre(n_theta);
  t_ = gl.nodes;
  wt_ = gl.weights;
  for (int m = 0; m <= mmax_; ++m) {
    Eigen::MatrixXd p(lmax_ + 1, n_theta), dp(lmax_ + 1, n_theta);
    Eigen::VectorXd col, dcol;
    for (int i = 0; i < n_theta; ++i) {
      normalized_legendre(lmax_, m, t_(i), col, &dcol);
      p.col(i) = col;
      dp.col(i) = dcol;
    }
    pbar_.push_back(p);
    dpbar_.push_back(dp);
  }
}

double SphereSpectral::azimuth(int j) const { return kTwoPi * j / n_phi_; }

Eigen::MatrixXcd SphereSpectral::analyze(const Eigen::VectorXcd& values) const {
  if (values.size() != n_theta_ * n_phi_) throw std::invalid_argument("sample count does not match sphere grid");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(lmax_ + 1, 2 * mmax_ + 1);
  Eigen::FFT<double> fft;
  for (int i = 0; i < n_theta_; ++i) {
    Eigen::VectorXcd ring = values.segment(i * n_phi_, n_phi_), spec;
    fft.fwd(spec, ring);
    spec /= static_cast<double>(n_phi_);
    for (int m = -mmax_; m <= mmax_; ++m) {
      const std::complex<double> fm = spec((m + n_phi_) % n_phi_);
      const int am = std::abs(m);
      for (int l = am; l <= lmax_; ++l) a(l, m + mmax_) += wt_(i) * fm * pbar_[am](l, i);
    }
  }
  return a;
}

namespace {

template <class RowFn>
Eigen::VectorXcd synthesize_rows(int n_theta, int n_phi, int lmax, int mmax, const Eigen::MatrixXcd& a, RowFn&& row_factor) {
  Eigen::VectorXcd out(n_theta * n_phi);
  Eigen::FFT<double> fft;
  for (int i = 0; i < n_theta; ++i) {
    Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(n_phi);
    for (int m = -mmax; m <= mmax; ++m) {
      std::complex<double> fm = 0.0;
      for (int l = std::abs(m); l <= lmax; ++l) fm += a(l, m + mmax) * row_factor(l, m, i);
      spec((m + n_phi) % n_phi) += fm;
    }
    Eigen::VectorXcd ring;
    fft.inv(ring, spec);
    out.segment(i * n_phi, n_phi) = ring * static_cast<double>(n_phi);
  }
  return out;
}

}  // namespace

Eigen::VectorXcd SphereSpectral::synthesize(const Eigen::MatrixXcd& a) const {
  return synthesize_rows(n_theta_, n_phi_, lmax_, mmax_, a, [&](int l, int m, int i) -> std::complex<double> {
    return pbar_[std::abs(m)](l, i);
  });
}

Eigen::VectorXcd SphereSpectral::d_theta(const Eigen::MatrixXcd& a) const {
  return synthesize_rows(n_theta_, n_phi_, lmax_, mmax_, a, [&](int l, int m, int i) -> std::complex<double> {
    return dpbar_[std::abs(m)](l, i);
  });
}

Eigen::VectorXcd SphereSpectral::d_phi(const Eigen::MatrixXcd& a) const {
  return synthesize_rows(n_theta_, n_phi_, lmax_, mmax_, a, [&](int l, int m, int i) {
    return std::complex<double>(0.0, m) * pbar_[std::abs(m)](l, i);
  });
}

std::complex<double> SphereSpectral::evaluate(const Eigen::MatrixXcd& a, double cos_theta, double phi) const {
  std::complex<double> s = 0.0;
  Eigen::VectorXd p;
  for (int m = -mmax_; m <= mmax_; ++m) {
    normalized_legendre(lmax_, std::abs(m), cos_theta, p);
    std::complex<double> fm = 0.0;
    for (int l = std::abs(m); l <= lmax_; ++l) fm += a(l, m + mmax_) * p(l);
    s += fm * std::polar(1.0, m * phi);
  }
  return s;
}

}  // namespace dwc
