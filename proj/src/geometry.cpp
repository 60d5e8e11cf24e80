#include "dwc/geometry.hpp"

#include <cmath>
#include <sstream>

namespace dwc {

namespace {

std::string point_string(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index a = 0; a < x.size(); ++a) os << (a ? ", " : "") << x(a);
  os << ")";
  return os.str();
}

Eigen::MatrixXd gradient_matrix(const Hamiltonians& h, const Eigen::VectorXd& x) {
  if (h.empty()) throw std::invalid_argument("empty Hamiltonian list");
  Eigen::MatrixXd g(x.size(), static_cast<Eigen::Index>(h.size()));
  for (std::size_t j = 0; j < h.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = h[j].gradient(x);
  return g;
}

}  // namespace

ScalarHamiltonian::ScalarHamiltonian(PolySymbol phi)
    : phi_(std::move(phi)), grad_(VectorField::zero(phi_.dimension())) {
  if (!phi_.is_xi_free() || !phi_.is_hbar_free())
    throw std::invalid_argument("Hamiltonian must be a position-only, hbar-free polynomial");
  const std::size_t n = phi_.dimension();
  std::vector<PolySymbol> g;
  for (std::size_t a = 0; a < n; ++a) g.push_back(partial(phi_, Variable::x(a)));
  grad_ = VectorField(g);
  hess_.assign(n, std::vector<PolySymbol>(n, PolySymbol(n)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) hess_[a][b] = partial(g[a], Variable::x(b));
  value_c_ = CompiledSymbol(phi_);
  for (std::size_t a = 0; a < n; ++a) {
    grad_c_.emplace_back(g[a]);
    hess_c_.emplace_back();
    for (std::size_t b = 0; b < n; ++b) hess_c_[a].emplace_back(hess_[a][b]);
  }
}

double ScalarHamiltonian::value(const Eigen::VectorXd& x) const { return value_c_.real(x); }

Eigen::VectorXd ScalarHamiltonian::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) g(a) = grad_c_[static_cast<std::size_t>(a)].real(x);
  return g;
}

Eigen::MatrixXd ScalarHamiltonian::hessian(const Eigen::VectorXd& x) const {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      h(a, b) = hess_c_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].real(x);
  return h;
}

ScalarHamiltonian radial_hamiltonian(std::size_t n) {
  return ScalarHamiltonian(position_square(n) * GaussianRational::fraction(1, 2));
}

CompiledField::CompiledField(const VectorField& field) : div_(field.divergence()) {
  const std::size_t n = field.dimension();
  for (std::size_t a = 0; a < n; ++a) {
    comps_.emplace_back(field[a]);
    jac_.emplace_back();
    for (std::size_t b = 0; b < n; ++b) jac_[a].emplace_back(partial(field[a], Variable::x(b)));
  }
}

Eigen::VectorXd CompiledField::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  for (Eigen::Index a = 0; a < x.size(); ++a) y(a) = comps_[static_cast<std::size_t>(a)].real(x);
  return y;
}

Eigen::MatrixXd CompiledField::jacobian(const Eigen::VectorXd& x) const {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd j(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) j(a, b) = jac_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].real(x);
  return j;
}

double jacobian_wedge_norm(const Hamiltonians& h, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd g = gradient_matrix(h, x);
  if (h.size() == 1) return g.col(0).norm();
  return std::sqrt(std::max(0.0, (g.transpose() * g).determinant()));
}

double rho(const Hamiltonians& h, const Eigen::VectorXd& x, double threshold) {
  const double w = jacobian_wedge_norm(h, x);
  if (!(w > threshold)) throw SingularPoint("wedge norm " + std::to_string(w) + " below threshold at " + point_string(x));
  return 1.0 / w;
}

Eigen::VectorXd project_qx(const Hamiltonians& h, const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                           double threshold) {
  rho(h, x, threshold);
  const Eigen::MatrixXd g = gradient_matrix(h, x);
  const Eigen::MatrixXd gram = g.transpose() * g;
  return xi - g * gram.ldlt().solve(g.transpose() * xi);
}

double tangency_residual(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& x) {
  const Eigen::VectorXd yx = y(x);
  double r = 0.0;
  for (const auto& phi : h) r = std::max(r, std::abs(yx.dot(phi.gradient(x))));
  return r;
}

double tangency_residual(const VectorField& y, const Hamiltonians& h, const Eigen::VectorXd& x) {
  return tangency_residual(CompiledField(y), h, x);
}

void require_tangent(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& x, double tolerance) {
  const Eigen::VectorXd yx = y(x);
  for (const auto& phi : h) {
    const Eigen::VectorXd g = phi.gradient(x);
    if (std::abs(yx.dot(g)) > tolerance * std::max(1.0, yx.norm() * g.norm()))
      throw NotTangent("field is not tangent to the level set at " + point_string(x));
  }
}

double gradient_consistency(const TestFunction& u, const std::vector<Eigen::VectorXd>& probes, double step) {
  double worst = 0.0;
  for (const auto& x : probes) {
    const Eigen::VectorXcd g = u.gradient(x);
    for (Eigen::Index a = 0; a < x.size(); ++a) {
      Eigen::VectorXd p = x, m = x;
      p(a) += step;
      m(a) -= step;
      const std::complex<double> fd = (u.value(p) - u.value(m)) / (2.0 * step);
      worst = std::max(worst, std::abs(fd - g(a)) / std::max(1.0, std::abs(g(a))));
    }
  }
  return worst;
}

std::complex<double> ambient_JY_apply(const CompiledField& y, const TestFunction& u, double hbar,
                                      const Eigen::VectorXd& x) {
  const Eigen::VectorXd yx = y(x);
  const Eigen::VectorXcd g = u.gradient(x);
  std::complex<double> s = 0.0;
  for (Eigen::Index a = 0; a < x.size(); ++a) s += yx(a) * g(a);
  s += 0.5 * y.divergence(x) * u.value(x);
  return std::complex<double>(0.0, -hbar) * s;
}

std::complex<double> ambient_JY_apply(const VectorField& y, const TestFunction& u, double hbar,
                                      const Eigen::VectorXd& x) {
  return ambient_JY_apply(CompiledField(y), u, hbar, x);
}

double induced_divergence(const CompiledField& y, const ScalarHamiltonian& phi, const Eigen::VectorXd& z,
                          double tangency_tolerance) {
  const Hamiltonians h{phi};
  rho(h, z);
  require_tangent(y, h, z, tangency_tolerance);
  const Eigen::VectorXd g = phi.gradient(z);
  return y.divergence(z) + (phi.hessian(z) * y(z)).dot(g) / g.squaredNorm();
}

double induced_divergence(const VectorField& y, const ScalarHamiltonian& phi, const Eigen::VectorXd& z) {
  return induced_divergence(CompiledField(y), phi, z);
}

mpq_class induced_divergence_exact(const VectorField& y, const ScalarHamiltonian& phi, const std::vector<mpq_class>& z) {
  const std::size_t n = phi.dimension();
  if (y.dimension() != n || z.size() != n) throw DimensionMismatch("field, Hamiltonian and point dimensions differ");
  const std::vector<mpq_class> none(n, 0);
  auto at = [&](const PolySymbol& f) { return evaluate_exact(f, z, none, 0).re(); };
  std::vector<mpq_class> g(n), yz(n);
  mpq_class g2 = 0, tangency = 0;
  for (std::size_t a = 0; a < n; ++a) {
    g[a] = at(phi.gradient_field()[a]);
    yz[a] = at(y[a]);
    g2 += g[a] * g[a];
    tangency += g[a] * yz[a];
  }
  if (g2 == 0) throw SingularPoint("gradient vanishes at the exact probe point");
  if (tangency != 0) throw NotTangent("field is not tangent at the exact probe point");
  mpq_class correction = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) correction += at(phi.hessian_entry(a, b)) * yz[b] * g[a];
  return at(y.divergence()) + correction / g2;
}

double log_rho_derivative(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& z) {
  const Eigen::MatrixXd g = gradient_matrix(h, z);
  const Eigen::VectorXd yz = y(z);
  const Eigen::Index k = g.cols();
  Eigen::MatrixXd hy(z.size(), k);
  for (Eigen::Index j = 0; j < k; ++j) hy.col(j) = h[static_cast<std::size_t>(j)].hessian(z) * yz;
  // Y(G) for G = g^T g, then Y(rho)/rho = -tr(G^{-1} Y(G)) / 2.
  const Eigen::MatrixXd dgram = hy.transpose() * g + g.transpose() * hy;
  const Eigen::MatrixXd gram = g.transpose() * g;
  return -0.5 * gram.ldlt().solve(dgram).trace();
}

double induced_divergence(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& z,
                          double tangency_tolerance) {
  rho(h, z);
  require_tangent(y, h, z, tangency_tolerance);
  return y.divergence(z) - log_rho_derivative(y, h, z);
}

Eigen::VectorXd moment_map_eval(const std::vector<VectorField>& generators, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& xi) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(generators.size()));
  for (std::size_t a = 0; a < generators.size(); ++a)
    out(static_cast<Eigen::Index>(a)) = CompiledField(generators[a])(x).dot(xi);
  return out;
}

Eigen::VectorXd flow_shift(const Hamiltonians& h, const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                           const Eigen::VectorXd& t) {
  if (t.size() != static_cast<Eigen::Index>(h.size())) throw DimensionMismatch("one flow time per Hamiltonian");
  Eigen::VectorXd out = xi;
  for (std::size_t j = 0; j < h.size(); ++j) out += t(static_cast<Eigen::Index>(j)) * h[j].gradient(x);
  return out;
}

}  // namespace dwc
