#include "dwc/fiber.hpp"

#include <cmath>
#include <numbers>

#include "dwc/quadrature.hpp"
#include "dwc/stereo.hpp"

namespace dwc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector2d rotate_quarter(const Eigen::VectorXd& g) { return Eigen::Vector2d(-g(1), g(0)); }

Eigen::Vector2d curve_tangent(const ScalarHamiltonian& phi, const Eigen::Vector2d& z) {
  const Eigen::VectorXd g = phi.gradient(z);
  return rotate_quarter(g) / g.norm();
}

Eigen::Vector2d project_to_level(const ScalarHamiltonian& phi, double level, Eigen::Vector2d z) {
  for (int it = 0; it < 8; ++it) {
    const Eigen::VectorXd g = phi.gradient(z);
    const double r = phi.value(z) - level;
    z -= r * g / g.squaredNorm();
    if (std::abs(r) < 1e-15 * std::max(1.0, std::abs(level))) break;
  }
  return z;
}

Eigen::Vector2d continuation_step(const ScalarHamiltonian& phi, double level, const Eigen::Vector2d& z, double h) {
  const Eigen::Vector2d k1 = curve_tangent(phi, z);
  const Eigen::Vector2d k2 = curve_tangent(phi, z + 0.5 * h * k1);
  const Eigen::Vector2d k3 = curve_tangent(phi, z + 0.5 * h * k2);
  const Eigen::Vector2d k4 = curve_tangent(phi, z + h * k3);
  return project_to_level(phi, level, z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

double unwrap(double previous, double angle) {
  while (angle - previous > std::numbers::pi) angle -= kTwoPi;
  while (angle - previous < -std::numbers::pi) angle += kTwoPi;
  return angle;
}

// Radius s with phi(s omega) = level along the ray omega, by Newton from s0.
double ray_radius(const ScalarHamiltonian& phi, double level, const Eigen::Vector2d& omega, double s0) {
  double s = s0;
  for (int it = 0; it < 60; ++it) {
    const Eigen::Vector2d z = s * omega;
    const double slope = phi.gradient(z).dot(omega);
    if (!(slope > 0.0)) throw ParametrizationUnavailable("level curve is not star-shaped about the origin");
    const double ds = (phi.value(z) - level) / slope;
    s -= ds;
    if (std::abs(ds) < 1e-15 * std::max(1.0, std::abs(s))) break;
  }
  if (!(s > 0.0)) throw ParametrizationUnavailable("level curve does not cross the ray");
  return s;
}

}  // namespace

const char* to_string(FiberKind kind) {
  switch (kind) {
    case FiberKind::circle: return "circle";
    case FiberKind::sphere2: return "sphere2";
    case FiberKind::implicit_curve: return "implicit-curve";
    case FiberKind::line: return "line";
  }
  return "unknown";
}

void LevelSetModel::finish(double node_tolerance) {
  rho_.resize(nodes_.cols());
  for (Eigen::Index i = 0; i < nodes_.cols(); ++i) {
    const Eigen::VectorXd z = nodes_.col(i);
    for (const auto& h : hams_)
      if (std::abs(h.value(z) - level_) > node_tolerance * std::max(1.0, std::abs(level_)))
        throw std::invalid_argument("fiber node is off the level set");
    rho_(i) = rho(hams_, z);
  }
}

LevelSetModel LevelSetModel::circle(double radius, int nodes) { return circle(radial_hamiltonian(2), radius, nodes); }

LevelSetModel LevelSetModel::circle(const ScalarHamiltonian& phi, double radius, int nodes) {
  if (phi.dimension() != 2) throw DimensionMismatch("circle fibers live in the plane");
  if (!(radius > 0.0) || nodes < 3) throw std::invalid_argument("circle needs positive radius and at least 3 nodes");
  LevelSetModel m;
  m.kind_ = FiberKind::circle;
  m.hams_ = {phi};
  m.radius_ = radius;
  m.length_ = kTwoPi * radius;
  m.nodes_.resize(2, nodes);
  m.tangents_.resize(2, nodes);
  for (int k = 0; k < nodes; ++k) {
    const double a = kTwoPi * k / nodes;
    m.nodes_.col(k) << radius * std::cos(a), radius * std::sin(a);
    m.tangents_.col(k) << -std::sin(a), std::cos(a);
  }
  m.weights_ = Eigen::VectorXd::Constant(nodes, m.length_ / nodes);
  m.level_ = phi.value(m.nodes_.col(0));
  m.finish(1e-12);
  return m;
}

LevelSetModel LevelSetModel::sphere2(double radius, int n_theta, int n_phi) {
  return sphere2(radial_hamiltonian(3), radius, n_theta, n_phi);
}

LevelSetModel LevelSetModel::sphere2(const ScalarHamiltonian& phi, double radius, int n_theta, int n_phi) {
  if (phi.dimension() != 3) throw DimensionMismatch("sphere2 fibers live in R^3");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere needs positive radius");
  LevelSetModel m;
  m.kind_ = FiberKind::sphere2;
  m.hams_ = {phi};
  m.radius_ = radius;
  m.sphere_ = std::make_shared<SphereSpectral>(n_theta, n_phi);
  const auto& grid = *m.sphere_;
  const int total = n_theta * n_phi;
  m.nodes_.resize(3, total);
  m.weights_.resize(total);
  for (int i = 0; i < n_theta; ++i) {
    const double t = grid.cos_theta()(i), s = std::sqrt(1.0 - t * t);
    for (int j = 0; j < n_phi; ++j) {
      const double a = grid.azimuth(j);
      m.nodes_.col(i * n_phi + j) << radius * s * std::cos(a), radius * s * std::sin(a), radius * t;
      m.weights_(i * n_phi + j) = radius * radius * grid.t_weights()(i) * kTwoPi / n_phi;
    }
  }
  m.level_ = phi.value(m.nodes_.col(0));
  m.finish(1e-12);
  return m;
}

LevelSetModel LevelSetModel::implicit_curve(const ScalarHamiltonian& phi, double level, int nodes, int substeps) {
  if (phi.dimension() != 2) throw DimensionMismatch("implicit curves live in the plane");
  if (nodes < 3 || substeps < 1) throw std::invalid_argument("implicit curve needs >= 3 nodes and >= 1 substep");
  const Eigen::Vector2d start(ray_radius(phi, level, Eigen::Vector2d(1.0, 0.0), 1.0), 0.0);
  if (!(phi.gradient(start).norm() > kRegularityThreshold)) throw SingularPoint("singular start point on the curve");

  // First pass: march until the winding angle reaches 2 pi, then bisect the last step.
  const double h0 = kTwoPi * start.norm() / (nodes * substeps);
  Eigen::Vector2d z = start;
  double angle = 0.0, travelled = 0.0;
  const int max_steps = 1000 * nodes * substeps;
  int steps = 0;
  for (;; ++steps) {
    if (steps > max_steps) throw ParametrizationUnavailable("continuation did not close");
    const Eigen::Vector2d next = continuation_step(phi, level, z, h0);
    const double next_angle = unwrap(angle, std::atan2(next(1), next(0)));
    if (next_angle < angle) throw ParametrizationUnavailable("level curve is not star-shaped about the origin");
    if (next_angle >= kTwoPi) {
      double lo = 0.0, hi = h0;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eigen::Vector2d p = continuation_step(phi, level, z, mid);
        (unwrap(angle, std::atan2(p(1), p(0))) < kTwoPi ? lo : hi) = mid;
      }
      travelled += 0.5 * (lo + hi);
      break;
    }
    z = next;
    angle = next_angle;
    travelled += h0;
  }

  // Second pass with a step that closes the curve exactly.
  const double h = travelled / (nodes * substeps);
  LevelSetModel m;
  m.kind_ = FiberKind::implicit_curve;
  m.hams_ = {phi};
  m.level_ = level;
  m.length_ = travelled;
  m.nodes_.resize(2, nodes);
  m.tangents_.resize(2, nodes);
  z = start;
  for (int k = 0; k < nodes; ++k) {
    m.nodes_.col(k) = z;
    m.tangents_.col(k) = curve_tangent(phi, z);
    for (int s = 0; s < substeps; ++s) z = continuation_step(phi, level, z, h);
  }
  if ((z - start).norm() > 1e-8 * std::max(1.0, start.norm()))
    throw ParametrizationUnavailable("continuation closure error too large");
  m.weights_ = Eigen::VectorXd::Constant(nodes, travelled / nodes);
  m.finish(1e-12);
  return m;
}

LevelSetModel LevelSetModel::line(const ScalarHamiltonian& phi, double level, double half_width, int nodes) {
  if (phi.dimension() != 2) throw DimensionMismatch("line fibers live in the plane");
  if (phi.phi().degree() > 1) throw std::invalid_argument("line fibers need an affine Hamiltonian");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const Eigen::VectorXd g = phi.gradient(zero);
  if (!(g.norm() > kRegularityThreshold)) throw SingularPoint("constant Hamiltonian has no regular level lines");
  const Eigen::VectorXd base = (level - phi.value(zero)) * g / g.squaredNorm();
  const Eigen::Vector2d dir = rotate_quarter(g) / g.norm();
  const QuadratureRule gl = gauss_legendre(nodes, -half_width, half_width);
  LevelSetModel m;
  m.kind_ = FiberKind::line;
  m.hams_ = {phi};
  m.level_ = level;
  m.length_ = 2.0 * half_width;
  m.nodes_.resize(2, nodes);
  m.tangents_.resize(2, nodes);
  for (int k = 0; k < nodes; ++k) {
    m.nodes_.col(k) = base + gl.nodes(k) * dir;
    m.tangents_.col(k) = dir;
  }
  m.weights_ = gl.weights;
  m.line_params_ = gl.nodes;
  m.line_diff_ = std::make_shared<Eigen::MatrixXd>(lagrange_differentiation(gl.nodes));
  m.finish(1e-12);
  return m;
}

const SphereSpectral& LevelSetModel::sphere_grid() const {
  if (!sphere_) throw std::logic_error("fiber has no sphere grid");
  return *sphere_;
}

Eigen::VectorXd LevelSetModel::unit_tangent(std::size_t i) const {
  if (kind_ == FiberKind::sphere2) throw std::logic_error("sphere fibers have no unit tangent");
  return tangents_.col(static_cast<Eigen::Index>(i));
}

Eigen::VectorXcd LevelSetModel::sample(const std::function<std::complex<double>(const Eigen::VectorXd&)>& f) const {
  Eigen::VectorXcd out(nodes_.cols());
  for (Eigen::Index i = 0; i < nodes_.cols(); ++i) out(i) = f(nodes_.col(i));
  return out;
}

std::complex<double> LevelSetModel::inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
  return (u.conjugate().array() * v.array() * weights_.array()).sum();
}

double LevelSetModel::norm(const Eigen::VectorXcd& u) const {
  return std::sqrt((u.array().abs2() * weights_.array()).sum());
}

void LevelSetModel::require_tangent(const CompiledField& x, double tolerance) const {
  for (Eigen::Index i = 0; i < nodes_.cols(); ++i) dwc::require_tangent(x, hams_, nodes_.col(i), tolerance);
}

Eigen::VectorXcd LevelSetModel::tangent_derivative(const CompiledField& x, const Eigen::VectorXcd& u) const {
  if (u.size() != nodes_.cols()) throw DimensionMismatch("fiber function length does not match node count");
  require_tangent(x);
  const Eigen::Index n = nodes_.cols();
  Eigen::VectorXcd out(n);
  switch (kind_) {
    case FiberKind::circle:
    case FiberKind::implicit_curve: {
      const Eigen::VectorXcd du = periodic_derivative(u, length_);
      for (Eigen::Index i = 0; i < n; ++i) out(i) = x(nodes_.col(i)).dot(tangents_.col(i)) * du(i);
      break;
    }
    case FiberKind::line: {
      const Eigen::VectorXcd du = (*line_diff_).cast<std::complex<double>>() * u;
      for (Eigen::Index i = 0; i < n; ++i) out(i) = x(nodes_.col(i)).dot(tangents_.col(i)) * du(i);
      break;
    }
    case FiberKind::sphere2: {
      const auto& grid = *sphere_;
      const Eigen::MatrixXcd a = grid.analyze(u);
      const Eigen::VectorXcd dth = grid.d_theta(a), dph = grid.d_phi(a);
      for (int i = 0; i < grid.n_theta(); ++i) {
        const double t = grid.cos_theta()(i), s = std::sqrt(1.0 - t * t);
        for (int j = 0; j < grid.n_phi(); ++j) {
          const double az = grid.azimuth(j);
          const Eigen::Index k = i * grid.n_phi() + j;
          const Eigen::Vector3d e_theta(t * std::cos(az), t * std::sin(az), -s);
          const Eigen::Vector3d e_phi(-std::sin(az), std::cos(az), 0.0);
          const Eigen::VectorXd xv = x(nodes_.col(k));
          out(k) = (xv.dot(e_theta) * dth(k) + xv.dot(e_phi) * dph(k) / s) / radius_;
        }
      }
      break;
    }
  }
  return out;
}

Eigen::MatrixXcd LevelSetModel::tangent_derivative_matrix(const CompiledField& x) const {
  const Eigen::Index n = nodes_.cols();
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e(j) = 1.0;
    m.col(j) = tangent_derivative(x, e);
  }
  return m;
}

Eigen::VectorXd LevelSetModel::induced_divergence(const CompiledField& x, double tangency_tolerance) const {
  Eigen::VectorXd out(nodes_.cols());
  for (Eigen::Index i = 0; i < nodes_.cols(); ++i)
    out(i) = dwc::induced_divergence(x, hams_, nodes_.col(i), tangency_tolerance);
  return out;
}

double intrinsic_divergence_fd(const VectorField& y, const LevelSetModel& model, std::size_t i, double step) {
  const CompiledField field(y);
  const Eigen::VectorXd z = model.node(i);
  switch (model.kind()) {
    case FiberKind::circle:
    case FiberKind::sphere2: {
      const StereoChart chart(-z, model.radius());
      const int d = chart.chart_dimension();
      // Chart components Y^j = <d_j Upsilon, Y> / |d_j Upsilon|^2 (the chart is conformal).
      auto weighted_component = [&](const Eigen::VectorXd& c, int j) {
        const Eigen::MatrixXd jac = chart.inverse_jacobian(c);
        const double comp = jac.col(j).dot(field(chart.inverse(c))) / jac.col(j).squaredNorm();
        return chart.density(c) * comp;
      };
      double div = 0.0;
      for (int j = 0; j < d; ++j) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(d), m = Eigen::VectorXd::Zero(d);
        p(j) = step;
        m(j) = -step;
        div += (weighted_component(p, j) - weighted_component(m, j)) / (2.0 * step);
      }
      return div / chart.density(Eigen::VectorXd::Zero(d));
    }
    case FiberKind::implicit_curve: {
      const auto& phi = model.hamiltonian();
      const double level = model.level();
      const double theta0 = std::atan2(z(1), z(0));
      const double s0 = z.norm();
      // z(theta) = s(theta) omega(theta); s' from implicit differentiation.
      auto weighted_component = [&](double theta) {
        const Eigen::Vector2d omega(std::cos(theta), std::sin(theta)), domega(-std::sin(theta), std::cos(theta));
        const double s = ray_radius(phi, level, omega, s0);
        const Eigen::Vector2d zp = s * omega;
        const Eigen::VectorXd g = phi.gradient(zp);
        const double ds = -s * g.dot(domega) / g.dot(omega);
        const Eigen::Vector2d dz = ds * omega + s * domega;
        const double speed = dz.norm();
        return speed * dz.dot(field(zp)) / (speed * speed);
      };
      const double speed0 = [&] {
        const Eigen::Vector2d omega(std::cos(theta0), std::sin(theta0)), domega(-std::sin(theta0), std::cos(theta0));
        const Eigen::VectorXd g = phi.gradient(z);
        const double ds = -s0 * g.dot(domega) / g.dot(omega);
        return (ds * omega + s0 * domega).norm();
      }();
      return (weighted_component(theta0 + step) - weighted_component(theta0 - step)) / (2.0 * step) / speed0;
    }
    case FiberKind::line: {
      const Eigen::VectorXd dir = model.unit_tangent(i);
      return (field(z + step * dir).dot(dir) - field(z - step * dir).dot(dir)) / (2.0 * step);
    }
  }
  throw ParametrizationUnavailable("no chart for this fiber kind");
}

}  // namespace dwc
