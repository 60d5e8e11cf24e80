#include "dwc/gauss_poly.hpp"

#include <cmath>
#include <numbers>

namespace dwc {

namespace {

using cd = std::complex<double>;
using Poly = GaussPoly::Poly;

void add(Poly& p, const std::vector<int>& e, cd c) {
  if (c == cd(0.0)) return;
  auto [it, inserted] = p.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cd(0.0)) p.erase(it);
  }
}

Poly derivative(const Poly& p, std::size_t j) {
  Poly out;
  for (const auto& [e, c] : p) {
    if (e[j] == 0) continue;
    std::vector<int> d = e;
    --d[j];
    add(out, d, c * static_cast<double>(e[j]));
  }
  return out;
}

Poly times_x(const Poly& p, std::size_t j, double s = 1.0) {
  Poly out;
  for (const auto& [e, c] : p) {
    std::vector<int> d = e;
    ++d[j];
    add(out, d, s * c);
  }
  return out;
}

void add_scaled(Poly& p, const Poly& q, cd s) {
  for (const auto& [e, c] : q) add(p, e, s * c);
}

double gaussian_moment(int k, double c) {
  if (k % 2 == 1) return 0.0;
  return std::tgamma((k + 1) / 2.0) / std::pow(c, (k + 1) / 2.0);
}

}  // namespace

GaussPoly::GaussPoly(std::size_t n, double a, Poly p) : n_(n), a_(a), p_(std::move(p)) {
  if (!(a > 0.0)) throw std::invalid_argument("Gaussian exponent must be positive");
  int top = 0;
  for (const auto& [e, c] : p_) {
    if (e.size() != n) throw DimensionMismatch("exponent length does not match dimension");
    for (int k : e) top = std::max(top, k);
  }
  // Q_0 = 1, Q_{m+1} = i (Q_m' - k Q_m / (2a)).
  fourier_factors_.push_back({cd(1.0)});
  for (int m = 0; m < top; ++m) {
    const auto& q = fourier_factors_.back();
    std::vector<cd> next(q.size() + 1, 0.0);
    for (std::size_t d = 1; d < q.size(); ++d) next[d - 1] += q[d] * static_cast<double>(d);
    for (std::size_t d = 0; d < q.size(); ++d) next[d + 1] -= q[d] / (2.0 * a_);
    for (auto& c : next) c *= cd(0.0, 1.0);
    fourier_factors_.push_back(std::move(next));
  }
}

GaussPoly GaussPoly::gaussian(std::size_t n, double a, cd c) { return GaussPoly(n, a, Poly{{std::vector<int>(n, 0), c}}); }

GaussPoly GaussPoly::from_symbol(const PolySymbol& p, double a) {
  if (!p.is_xi_free() || !p.is_hbar_free()) throw std::invalid_argument("Gaussian prefactor must be position-only");
  Poly out;
  for (const auto& [m, c] : p.terms()) add(out, m.x, c.to_complex());
  return GaussPoly(p.dimension(), a, std::move(out));
}

cd GaussPoly::value(const Eigen::VectorXd& x) const {
  cd s = 0.0;
  for (const auto& [e, c] : p_) {
    double m = 1.0;
    for (std::size_t j = 0; j < n_; ++j) m *= std::pow(x(static_cast<Eigen::Index>(j)), e[j]);
    s += c * m;
  }
  return s * std::exp(-a_ * x.squaredNorm());
}

Eigen::VectorXcd GaussPoly::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXcd g(static_cast<Eigen::Index>(n_));
  for (std::size_t j = 0; j < n_; ++j) {
    Poly d = derivative(p_, j);
    add_scaled(d, times_x(p_, j), -2.0 * a_);
    g(static_cast<Eigen::Index>(j)) = GaussPoly(n_, a_, std::move(d)).value(x);
  }
  return g;
}

cd GaussPoly::fourier(const Eigen::VectorXd& xi) const {
  if (xi.size() != static_cast<Eigen::Index>(n_)) throw DimensionMismatch("frequency dimension mismatch");
  cd s = 0.0;
  for (const auto& [e, c] : p_) {
    cd term = c;
    for (std::size_t j = 0; j < n_; ++j) {
      const auto& q = fourier_factors_[static_cast<std::size_t>(e[j])];
      const double k = xi(static_cast<Eigen::Index>(j));
      cd qv = 0.0;
      for (std::size_t d = q.size(); d-- > 0;) qv = qv * k + q[d];
      term *= qv;
    }
    s += term;
  }
  return s * std::pow(2.0 * a_, -0.5 * static_cast<double>(n_)) * std::exp(-xi.squaredNorm() / (4.0 * a_));
}

GaussPoly GaussPoly::laplacian() const {
  Poly out;
  for (std::size_t j = 0; j < n_; ++j) {
    const Poly dj = derivative(p_, j);
    add_scaled(out, derivative(dj, j), 1.0);
    add_scaled(out, p_, -2.0 * a_);
    add_scaled(out, times_x(dj, j), -4.0 * a_);
    add_scaled(out, times_x(times_x(p_, j), j), 4.0 * a_ * a_);
  }
  return GaussPoly(n_, a_, std::move(out));
}

GaussPoly GaussPoly::times(const PolySymbol& q) const {
  if (q.dimension() != n_) throw DimensionMismatch("multiplier dimension mismatch");
  if (!q.is_xi_free() || !q.is_hbar_free()) throw std::invalid_argument("multiplier must be position-only");
  Poly out;
  for (const auto& [m, c] : q.terms())
    for (const auto& [e, d] : p_) {
      std::vector<int> s = e;
      for (std::size_t j = 0; j < n_; ++j) s[j] += m.x[j];
      add(out, s, c.to_complex() * d);
    }
  return GaussPoly(n_, a_, std::move(out));
}

GaussPoly GaussPoly::scaled(cd c) const {
  Poly out;
  for (const auto& [e, d] : p_) add(out, e, c * d);
  return GaussPoly(n_, a_, std::move(out));
}

cd GaussPoly::inner(const GaussPoly& v) const {
  if (v.n_ != n_) throw DimensionMismatch("inner product of functions in different dimensions");
  const double c = a_ + v.a_;
  cd s = 0.0;
  for (const auto& [e, p] : p_)
    for (const auto& [f, q] : v.p_) {
      double m = 1.0;
      for (std::size_t j = 0; j < n_ && m != 0.0; ++j) m *= gaussian_moment(e[j] + f[j], c);
      s += std::conj(p) * q * m;
    }
  return s;
}

TestFunction GaussPoly::as_test_function() const {
  TestFunction u;
  const GaussPoly self = *this;
  u.value = [self](const Eigen::VectorXd& x) { return self.value(x); };
  u.gradient = [self](const Eigen::VectorXd& x) { return self.gradient(x); };
  u.fourier = [self](const Eigen::VectorXd& xi) { return self.fourier(xi); };
  u.analytic_l2_norm = l2_norm();
  return u;
}

DftFourier::DftFourier(const std::function<cd(const Eigen::VectorXd&)>& u, const DftConfig& cfg) : cfg_(cfg) {
  const int m = cfg.nodes_per_axis;
  if (m < 4 || m % 2 != 0) throw std::invalid_argument("DFT grid needs an even number of nodes >= 4");
  fine_ = Samples(u, cfg.half_width, m);
  coarse_ = Samples(u, cfg.half_width, m / 2);
}

DftFourier::Samples::Samples(const std::function<cd(const Eigen::VectorXd&)>& u, double half_width, int m)
    : cell(2.0 * half_width / m) {
  points.resize(2, m * m);
  values.resize(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Eigen::Vector2d x(-half_width + (i + 0.5) * cell, -half_width + (j + 0.5) * cell);
      points.col(i * m + j) = x;
      values(i * m + j) = u(x);
    }
}

cd DftFourier::Samples::transform(const Eigen::VectorXd& xi) const {
  if (xi.size() != 2) throw DimensionMismatch("DFT fallback is implemented for n = 2");
  cd s = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) s += values(k) * std::polar(1.0, -points.col(k).dot(xi));
  return s * cell * cell / (2.0 * std::numbers::pi);
}

cd DftFourier::operator()(const Eigen::VectorXd& xi) const { return fine_.transform(xi); }

double DftFourier::error_estimate(const Eigen::VectorXd& xi) const {
  return std::abs(fine_.transform(xi) - coarse_.transform(xi));
}

}  // namespace dwc
