#include "dwc/quantization.hpp"

#include <cmath>
#include <numbers>

#include "dwc/quadrature.hpp"
#include "dwc/spectral.hpp"

namespace dwc {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

double smooth_step_weight(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

void require_sphere(const LevelSetModel& fiber) {
  if (fiber.kind() != FiberKind::circle && fiber.kind() != FiberKind::sphere2)
    throw std::invalid_argument("kernel quantization needs a circle or sphere fiber");
}

double induced_divergence_unchecked(const CompiledField& x, const Hamiltonians& h, const Eigen::VectorXd& z) {
  return x.divergence(z) - log_rho_derivative(x, h, z);
}

}  // namespace

MidpointPair midpoint_map(const Eigen::VectorXd& z, const Eigen::VectorXd& w, double r) {
  if (z.size() != w.size()) throw DimensionMismatch("midpoint of points in different dimensions");
  const double sum = (z + w).norm(), diff = (z - w).norm();
  if (sum <= 1e-12 * r) throw AntipodalPair("midpoint of antipodal points is undefined");
  MidpointPair out{r * (z + w) / sum, Eigen::VectorXd::Zero(z.size())};
  if (diff == 0.0) return out;
  const double theta = 2.0 * std::atan2(diff, sum);
  out.tangent = (r * theta / 2.0) * (z - w) / diff;
  return out;
}

std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> make_kappa(double radius, double inner, double outer) {
  if (!(0.0 < inner && inner < outer && outer < kPi)) throw std::invalid_argument("kappa needs 0 < inner < outer < pi");
  return [=](const Eigen::VectorXd&, const Eigen::VectorXd& v) {
    const double theta = 2.0 * v.norm() / radius;
    if (theta <= inner) return 1.0;
    if (theta >= outer) return 0.0;
    const double s = (theta - inner) / (outer - inner);
    const double a = smooth_step_weight(1.0 - s), b = smooth_step_weight(s);
    return a / (a + b);
  };
}

FiberOperator::FiberOperator(const LevelSetModel& fiber, Eigen::MatrixXcd weighted) : fiber_(&fiber), a_(std::move(weighted)) {
  if (a_.rows() != static_cast<Eigen::Index>(fiber.size()) || a_.cols() != a_.rows())
    throw DimensionMismatch("operator size does not match fiber node count");
}

Eigen::VectorXcd FiberOperator::apply(const Eigen::VectorXcd& u) const {
  if (u.size() != a_.cols()) throw DimensionMismatch("fiber function length does not match operator");
  return a_ * u;
}

double FiberOperator::symmetry_defect() const {
  const Eigen::MatrixXcd qa = fiber_->weights().asDiagonal() * a_;
  return (qa - qa.adjoint()).cwiseAbs().maxCoeff();
}

FiberOperator kernel_quantize(const PWSymbol& f, double hbar, const LevelSetModel& fiber) {
  if (hbar == 0.0) throw std::invalid_argument("hbar must be nonzero");
  require_sphere(fiber);
  const Eigen::Index n = static_cast<Eigen::Index>(fiber.size());
  const double r = fiber.radius();
  const double scale = std::pow(hbar, 1.0 - static_cast<double>(fiber.dimension()));
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd z = fiber.nodes().col(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::VectorXd w = fiber.nodes().col(j);
      if ((z + w).norm() <= 1e-12 * r) {
        a(i, j) = 0.0;
        continue;
      }
      const MidpointPair mv = midpoint_map(z, w, r);
      cd k = scale * f(mv.midpoint, mv.tangent / hbar);
      if (f.kappa) k *= f.kappa(mv.midpoint, mv.tangent);
      a(i, j) = k * fiber.weights()(j);
    }
  }
  return FiberOperator(fiber, std::move(a));
}

FiberOperator multiplication_op(const std::function<cd(const Eigen::VectorXd&)>& a, const LevelSetModel& fiber) {
  return FiberOperator(fiber, fiber.sample(a).asDiagonal());
}

Eigen::VectorXcd fiber_JX_apply(const VectorField& x, double hbar, const LevelSetModel& fiber, const Eigen::VectorXcd& u) {
  const CompiledField cx(x);
  const Eigen::VectorXcd du = fiber.tangent_derivative(cx, u);
  const Eigen::VectorXd div = fiber.induced_divergence(cx);
  return cd(0.0, -hbar) * (du + 0.5 * (div.array() * u.array()).matrix());
}

Eigen::MatrixXcd fiber_JX_matrix(const VectorField& x, double hbar, const LevelSetModel& fiber) {
  const CompiledField cx(x);
  Eigen::MatrixXcd m = fiber.tangent_derivative_matrix(cx);
  m.diagonal() += 0.5 * fiber.induced_divergence(cx).cast<cd>();
  return cd(0.0, -hbar) * m;
}

FlowPoint flow_back(const CompiledField& x, const LevelSetModel& fiber, const Eigen::VectorXd& z0, double t, int steps) {
  if (steps < 1) throw std::invalid_argument("flow needs at least one step");
  const auto& h = fiber.hamiltonians();
  const double dt = t / steps;
  auto rhs = [&](const Eigen::VectorXd& z, Eigen::VectorXd& dz, double& dl) {
    dz = -x(z);
    dl = -induced_divergence_unchecked(x, h, z);
  };
  Eigen::VectorXd z = z0;
  double l = 0.0;
  Eigen::VectorXd k1, k2, k3, k4;
  double l1, l2, l3, l4;
  for (int s = 0; s < steps; ++s) {
    rhs(z, k1, l1);
    rhs(z + 0.5 * dt * k1, k2, l2);
    rhs(z + 0.5 * dt * k2, k3, l3);
    rhs(z + dt * k3, k4, l4);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    l += dt / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  }
  if (!z.allFinite() || !std::isfinite(l)) throw StepSizeBreakdown("flow integration produced non-finite values");
  for (const auto& phi : h)
    if (std::abs(phi.value(z) - fiber.level()) > 1e-8 * std::max(1.0, std::abs(fiber.level())))
      throw StepSizeBreakdown("flow left the level set; reduce the step size");
  return {z, l};
}

Eigen::VectorXcd evolve_group(const VectorField& x, double t, double, const LevelSetModel& fiber,
                              const std::function<cd(const Eigen::VectorXd&)>& u, int steps) {
  const CompiledField cx(x);
  fiber.require_tangent(cx);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(fiber.size()));
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    const FlowPoint p = flow_back(cx, fiber, fiber.node(i), t, steps);
    out(static_cast<Eigen::Index>(i)) = std::exp(0.5 * p.log_density) * u(p.point);
  }
  return out;
}

Eigen::VectorXcd evolve_group(const VectorField& x, double t, double hbar, const LevelSetModel& fiber,
                              const Eigen::VectorXcd& u, int steps) {
  if (u.size() != static_cast<Eigen::Index>(fiber.size())) throw DimensionMismatch("fiber function length mismatch");
  switch (fiber.kind()) {
    case FiberKind::circle: {
      const PeriodicInterpolant interp(u, fiber.length());
      const double r = fiber.radius();
      return evolve_group(x, t, hbar, fiber, [&](const Eigen::VectorXd& z) {
        return interp(r * wrap_angle(std::atan2(z(1), z(0))));
      }, steps);
    }
    case FiberKind::sphere2: {
      const SphereSpectral& grid = fiber.sphere_grid();
      const Eigen::MatrixXcd a = grid.analyze(u);
      return evolve_group(x, t, hbar, fiber, [&](const Eigen::VectorXd& z) {
        return grid.evaluate(a, std::clamp(z(2) / z.norm(), -1.0, 1.0), std::atan2(z(1), z(0)));
      }, steps);
    }
    default:
      throw ParametrizationUnavailable("node-value interpolation is only available on circles and spheres");
  }
}

Vertical bump_vertical(double radius, double height) {
  return {[=](double u) {
            const double s = u / radius;
            return cd(s * s < 1.0 ? height * std::exp(-1.0 / (1.0 - s * s)) : 0.0);
          },
          radius};
}

Vertical product_vertical(const Vertical& a, const Vertical& b, int nodes) {
  const QuadratureRule gl = gauss_legendre(nodes);
  return {[=](double u) {
            const double lo = std::max(-a.support, u - b.support), hi = std::min(a.support, u + b.support);
            if (!(hi > lo)) return cd(0.0);
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            cd s = 0.0;
            for (Eigen::Index i = 0; i < gl.nodes.size(); ++i) {
              const double v = mid + half * gl.nodes(i);
              s += gl.weights(i) * a(v) * b(u - v);
            }
            return 2.0 * half * s;
          },
          a.support + b.support};
}

Vertical momentum_derivative(const Vertical& a) {
  return {[=](double u) { return cd(0.0, -2.0 * u) * a(u); }, a.support};
}

double SeparableSymbol::support() const {
  double s = 0.0;
  for (const auto& t : terms) s = std::max(s, t.vertical.support);
  return s;
}

PWSymbol SeparableSymbol::as_pw() const {
  PWSymbol out;
  out.support_radius = support();
  const auto copy = terms;
  out.fhat = [copy](const Eigen::VectorXd& m, const Eigen::VectorXd& v) {
    const double angle = wrap_angle(std::atan2(m(1), m(0)));
    const double p = v.dot(Eigen::Vector2d(-m(1), m(0)) / m.norm());
    cd s = 0.0;
    for (const auto& t : copy) s += t.base(angle) * t.vertical(p);
    return s;
  };
  return out;
}

SeparableSymbol separable_product(const SeparableSymbol& f, const SeparableSymbol& g) {
  SeparableSymbol out;
  for (const auto& a : f.terms)
    for (const auto& b : g.terms) {
      SeparableSymbol::Term t;
      t.base = [fa = a.base, gb = b.base](double s) { return fa(s) * gb(s); };
      if (a.dbase && b.dbase)
        t.dbase = [a, b](double s) { return a.dbase(s) * b.base(s) + a.base(s) * b.dbase(s); };
      t.vertical = product_vertical(a.vertical, b.vertical);
      out.terms.push_back(std::move(t));
    }
  return out;
}

SeparableSymbol separable_bracket(const SeparableSymbol& f, const SeparableSymbol& g, double radius) {
  SeparableSymbol out;
  for (const auto& a : f.terms)
    for (const auto& b : g.terms) {
      if (!a.dbase || !b.dbase) throw std::invalid_argument("bracket needs base derivatives");
      // d_p f d_s g - d_s f d_p g with d_s = (1/r) d/d angle.
      out.terms.push_back({[a, b, radius](double s) { return a.base(s) * b.dbase(s) / radius; }, {},
                           product_vertical(momentum_derivative(a.vertical), b.vertical)});
      out.terms.push_back({[a, b, radius](double s) { return -a.dbase(s) * b.base(s) / radius; }, {},
                           product_vertical(a.vertical, momentum_derivative(b.vertical))});
    }
  return out;
}

FiberOperator kernel_quantize(const SeparableSymbol& f, double hbar, const LevelSetModel& circle) {
  if (hbar == 0.0) throw std::invalid_argument("hbar must be nonzero");
  if (circle.kind() != FiberKind::circle) throw std::invalid_argument("separable quantization needs a circle fiber");
  const int n = static_cast<int>(circle.size());
  const double r = circle.radius();
  // Offset d = i - j (mod n): signed angle difference and per-term vertical factor.
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<Eigen::VectorXcd> vert(f.terms.size(), Eigen::VectorXcd::Zero(n));
  for (int d = 0; d < n; ++d) {
    double a = 2.0 * kPi * d / n;
    if (2 * d > n) a -= 2.0 * kPi;
    delta[static_cast<std::size_t>(d)] = a;
    if (2 * d == n) continue;
    for (std::size_t t = 0; t < f.terms.size(); ++t) vert[t](d) = f.terms[t].vertical(r * a / 2.0 / hbar) / hbar;
  }
  Eigen::MatrixXcd a(n, n);
  const double w = circle.weights()(0);
  for (int j = 0; j < n; ++j) {
    const double aj = 2.0 * kPi * j / n;
    for (int i = 0; i < n; ++i) {
      const int d = ((i - j) % n + n) % n;
      if (2 * d == n) {
        a(i, j) = 0.0;
        continue;
      }
      const double mid = wrap_angle(aj + delta[static_cast<std::size_t>(d)] / 2.0);
      cd k = 0.0;
      for (std::size_t t = 0; t < f.terms.size(); ++t)
        if (vert[t](d) != 0.0) k += f.terms[t].base(mid) * vert[t](d);
      a(i, j) = k * w;
    }
  }
  return FiberOperator(circle, std::move(a));
}

}  // namespace dwc
