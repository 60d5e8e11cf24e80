#include "dwc/direct_integral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dwc/quadrature.hpp"

namespace dwc {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Shape { radial, affine, quadratic };

struct Classified {
  Shape shape;
  double offset = 0.0;  // phi(0)
  double scale = 0.0;   // radial: phi = scale |x|^2 + offset
};

Classified classify(const ScalarHamiltonian& phi) {
  const std::size_t n = phi.dimension();
  if (phi.phi().degree() > 2) throw std::invalid_argument("grids are built for Hamiltonians of degree <= 2");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd h = phi.hessian(zero);
  const Eigen::VectorXd b = phi.gradient(zero);
  Classified c;
  c.offset = phi.value(zero);
  if (h.isZero(0.0)) {
    c.shape = Shape::affine;
    return c;
  }
  const double d = h(0, 0);
  if (b.isZero(0.0) && d > 0.0 && (h - d * Eigen::MatrixXd::Identity(h.rows(), h.cols())).isZero(0.0)) {
    c.shape = Shape::radial;
    c.scale = d / 2.0;
    return c;
  }
  c.shape = Shape::quadratic;
  return c;
}

std::string format_lambda(double l) {
  std::ostringstream os;
  os.precision(17);
  os << l;
  return os.str();
}

}  // namespace

std::vector<double> critical_values(const ScalarHamiltonian& phi) {
  if (phi.phi().degree() > 2) throw std::invalid_argument("critical values are computed for degree <= 2 only");
  const Eigen::Index n = static_cast<Eigen::Index>(phi.dimension());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const Eigen::MatrixXd h = phi.hessian(zero);
  const Eigen::VectorXd b = phi.gradient(zero);
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(h);
  const Eigen::VectorXd x = cod.solve(-b);
  if ((h * x + b).norm() > 1e-12 * std::max(1.0, b.norm())) return {};
  return {phi.value(x)};
}

LambdaGrid::LambdaGrid(Hamiltonians h, Eigen::VectorXd lambdas, Eigen::VectorXd weights, std::vector<LevelSetModel> fibers,
                       std::optional<std::pair<double, double>> range)
    : hams_(std::move(h)), lambdas_(std::move(lambdas)), weights_(std::move(weights)), fibers_(std::move(fibers)) {
  if (lambdas_.size() == 0) throw EmptyRange("grid has no lambda nodes");
  range_ = range.value_or(std::make_pair(lambdas_.minCoeff(), lambdas_.maxCoeff()));
  if (lambdas_.size() != weights_.size() || static_cast<std::size_t>(lambdas_.size()) != fibers_.size())
    throw DimensionMismatch("lambda nodes, weights and fibers must have equal length");
  if ((weights_.array() <= 0.0).any()) throw std::invalid_argument("lambda weights must be positive");
}

std::size_t LambdaGrid::total_nodes() const {
  std::size_t n = 0;
  for (const auto& f : fibers_) n += f.size();
  return n;
}

LambdaGrid build_grid(const ScalarHamiltonian& phi, const GridConfig& cfg) {
  if (!(cfg.lambda_min < cfg.lambda_max)) throw EmptyRange("lambda range is empty");
  if (cfg.lambda_nodes < 1 || cfg.fiber_nodes < 3) throw std::invalid_argument("grid resolutions must be positive");
  const std::size_t n = phi.dimension();
  const Classified shape = classify(phi);
  const std::vector<double> crit = critical_values(phi);
  for (double c : crit)
    if (c >= cfg.lambda_min && c <= cfg.lambda_max)
      throw SingularLevel("lambda range contains the critical value " + format_lambda(c));
  if (shape.shape != Shape::affine) {
    const Eigen::MatrixXd h = phi.hessian(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (!crit.empty() && es.eigenvalues().minCoeff() > 0.0 && cfg.lambda_max < crit.front())
      throw EmptyRange("lambda range lies below the minimum of the Hamiltonian");
  }

  Eigen::VectorXd lambdas, weights;
  switch (cfg.spacing) {
    case LambdaSpacing::gauss_legendre: {
      const QuadratureRule r = gauss_legendre(cfg.lambda_nodes, cfg.lambda_min, cfg.lambda_max);
      lambdas = r.nodes;
      weights = r.weights;
      break;
    }
    case LambdaSpacing::sqrt: {
      double base = cfg.lambda_min;
      for (double c : crit)
        if (c <= cfg.lambda_min) base = c;
      const QuadratureRule r = gauss_legendre(cfg.lambda_nodes, std::sqrt(cfg.lambda_min - base), std::sqrt(cfg.lambda_max - base));
      lambdas = (base + r.nodes.array().square()).matrix();
      weights = (2.0 * r.nodes.array() * r.weights.array()).matrix();
      break;
    }
    case LambdaSpacing::uniform: {
      if (cfg.lambda_nodes < 2) throw std::invalid_argument("uniform spacing needs at least two nodes");
      lambdas = Eigen::VectorXd::LinSpaced(cfg.lambda_nodes, cfg.lambda_min, cfg.lambda_max);
      const double h = (cfg.lambda_max - cfg.lambda_min) / (cfg.lambda_nodes - 1);
      weights = Eigen::VectorXd::Constant(cfg.lambda_nodes, h);
      weights(0) = weights(cfg.lambda_nodes - 1) = h / 2.0;
      break;
    }
  }

  std::vector<LevelSetModel> fibers;
  fibers.reserve(static_cast<std::size_t>(lambdas.size()));
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const double l = lambdas(k);
    try {
      if (shape.shape == Shape::radial) {
        const double r = std::sqrt((l - shape.offset) / shape.scale);
        if (n == 2) {
          fibers.push_back(LevelSetModel::circle(phi, r, cfg.fiber_nodes));
        } else if (n == 3) {
          const int nt = std::max(2, static_cast<int>(std::lround(std::sqrt(cfg.fiber_nodes / 2.0))));
          fibers.push_back(LevelSetModel::sphere2(phi, r, nt, 2 * nt));
        } else {
          throw ParametrizationUnavailable("radial fibers are supported for n = 2, 3");
        }
      } else if (n != 2) {
        throw ParametrizationUnavailable("non-radial fibers are supported in the plane only");
      } else if (shape.shape == Shape::affine) {
        fibers.push_back(LevelSetModel::line(phi, l, cfg.line_half_width, cfg.fiber_nodes));
      } else {
        fibers.push_back(LevelSetModel::implicit_curve(phi, l, cfg.fiber_nodes, cfg.continuation_substeps));
      }
    } catch (const SingularPoint& e) {
      throw SingularLevel("singular fiber node at lambda = " + format_lambda(l) + ": " + e.what());
    }
  }
  return LambdaGrid({phi}, std::move(lambdas), std::move(weights), std::move(fibers),
                    std::make_pair(cfg.lambda_min, cfg.lambda_max));
}

double Section::squared_norm() const { return inner(*this).real(); }

cd Section::inner(const Section& other) const {
  if (grid != other.grid || values.size() != other.values.size()) throw DimensionMismatch("sections on different grids");
  cd s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += grid->weights()(static_cast<Eigen::Index>(k)) * grid->fiber(k).inner(values[k], other.values[k]);
  return s;
}

Section Section::operator-(const Section& other) const {
  if (grid != other.grid || values.size() != other.values.size()) throw DimensionMismatch("sections on different grids");
  Section out{grid, values};
  for (std::size_t k = 0; k < values.size(); ++k) out.values[k] -= other.values[k];
  return out;
}

Section Section::multiply_by_lambda(const std::function<cd(double)>& b) const {
  Section out{grid, values};
  for (std::size_t k = 0; k < values.size(); ++k) out.values[k] *= b(grid->lambdas()(static_cast<Eigen::Index>(k)));
  return out;
}

Section zero_section(const LambdaGrid& grid) {
  Section s{&grid, {}};
  for (const auto& f : grid.fibers()) s.values.push_back(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f.size())));
  return s;
}

Section apply_Tx(const ComplexFunction& u, const LambdaGrid& grid) {
  Section s{&grid, {}};
  for (const auto& f : grid.fibers())
    s.values.push_back((f.rho_values().array().sqrt().cast<cd>() * f.sample(u).array()).matrix());
  return s;
}

Section apply_Tx(const TestFunction& u, const LambdaGrid& grid) { return apply_Tx(u.value, grid); }

std::vector<Eigen::VectorXcd> apply_Tx_adjoint(const Section& s) {
  std::vector<Eigen::VectorXcd> out;
  for (std::size_t k = 0; k < s.values.size(); ++k)
    out.push_back((s.values[k].array() / s.grid->fiber(k).rho_values().array().sqrt().cast<cd>()).matrix());
  return out;
}

std::vector<cd> apply_Tx_adjoint(const Section& s, const std::vector<Eigen::VectorXd>& probes, double snap_tolerance) {
  const LambdaGrid& grid = *s.grid;
  std::vector<cd> out;
  for (const auto& x : probes) {
    const double l = grid.hamiltonians().front().value(x);
    bool found = false;
    for (std::size_t k = 0; k < grid.size() && !found; ++k) {
      if (std::abs(grid.lambdas()(static_cast<Eigen::Index>(k)) - l) > snap_tolerance * std::max(1.0, std::abs(l))) continue;
      const LevelSetModel& f = grid.fiber(k);
      for (std::size_t i = 0; i < f.size(); ++i) {
        if ((f.node(i) - x).norm() > snap_tolerance * std::max(1.0, x.norm())) continue;
        out.push_back(s.values[k](static_cast<Eigen::Index>(i)) / std::sqrt(f.rho_values()(static_cast<Eigen::Index>(i))));
        found = true;
        break;
      }
    }
    if (!found) throw ProbeOffGrid("probe point is not within snap tolerance of any fiber node");
  }
  return out;
}

AmbientQuadrature AmbientQuadrature::shell(std::size_t n, double r_min, double r_max, int radial_nodes, int angular_nodes) {
  if (!(0.0 <= r_min && r_min < r_max)) throw std::invalid_argument("shell needs 0 <= r_min < r_max");
  const QuadratureRule rr = gauss_legendre(radial_nodes, r_min, r_max);
  AmbientQuadrature q;
  if (n == 2) {
    q.nodes.resize(2, radial_nodes * angular_nodes);
    q.weights.resize(radial_nodes * angular_nodes);
    for (int i = 0; i < radial_nodes; ++i)
      for (int j = 0; j < angular_nodes; ++j) {
        const double a = kTwoPi * j / angular_nodes, r = rr.nodes(i);
        q.nodes.col(i * angular_nodes + j) << r * std::cos(a), r * std::sin(a);
        q.weights(i * angular_nodes + j) = rr.weights(i) * r * kTwoPi / angular_nodes;
      }
    return q;
  }
  if (n == 3) {
    const QuadratureRule rt = gauss_legendre(angular_nodes);
    const int nphi = 2 * angular_nodes;
    const int per = angular_nodes * nphi;
    q.nodes.resize(3, radial_nodes * per);
    q.weights.resize(radial_nodes * per);
    for (int i = 0; i < radial_nodes; ++i)
      for (int t = 0; t < angular_nodes; ++t)
        for (int j = 0; j < nphi; ++j) {
          const double r = rr.nodes(i), c = rt.nodes(t), s = std::sqrt(1.0 - c * c), a = kTwoPi * j / nphi;
          const int k = i * per + t * nphi + j;
          q.nodes.col(k) << r * s * std::cos(a), r * s * std::sin(a), r * c;
          q.weights(k) = rr.weights(i) * r * r * rt.weights(t) * kTwoPi / nphi;
        }
    return q;
  }
  throw std::invalid_argument("shell quadrature is implemented for n = 2, 3");
}

AmbientQuadrature AmbientQuadrature::box(std::size_t n, double half_width, int nodes_per_axis) {
  const QuadratureRule r = gauss_legendre(nodes_per_axis, -half_width, half_width);
  const Eigen::Index m = nodes_per_axis;
  Eigen::Index total = 1;
  for (std::size_t a = 0; a < n; ++a) total *= m;
  AmbientQuadrature q;
  q.nodes.resize(static_cast<Eigen::Index>(n), total);
  q.weights.resize(total);
  for (Eigen::Index k = 0; k < total; ++k) {
    Eigen::Index rest = k;
    double w = 1.0;
    for (std::size_t a = 0; a < n; ++a) {
      const Eigen::Index i = rest % m;
      rest /= m;
      q.nodes(static_cast<Eigen::Index>(a), k) = r.nodes(i);
      w *= r.weights(i);
    }
    q.weights(k) = w;
  }
  return q;
}

AmbientQuadrature matched_shell(const LambdaGrid& grid, int radial_nodes, int angular_nodes) {
  const auto& phi = grid.hamiltonians().front();
  const std::size_t n = grid.dimension();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const Classified c = classify(phi);
  if (c.shape == Shape::affine || !phi.gradient(zero).isZero(0.0) ||
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(phi.hessian(zero)).eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("matched shells need a positive definite quadratic centred at the origin");
  if (n != 2 && n != 3) throw std::invalid_argument("matched shells are implemented for n = 2, 3");
  const auto [lo, hi] = grid.range();
  const QuadratureRule rr = gauss_legendre(radial_nodes, 0.0, 1.0);

  // Directions with solid-angle weights.
  std::vector<Eigen::VectorXd> dirs;
  std::vector<double> dw;
  if (n == 2) {
    for (int j = 0; j < angular_nodes; ++j) {
      const double a = kTwoPi * j / angular_nodes;
      dirs.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
      dw.push_back(kTwoPi / angular_nodes);
    }
  } else {
    const QuadratureRule rt = gauss_legendre(angular_nodes);
    const int nphi = 2 * angular_nodes;
    for (int t = 0; t < angular_nodes; ++t)
      for (int j = 0; j < nphi; ++j) {
        const double ct = rt.nodes(t), st = std::sqrt(1.0 - ct * ct), a = kTwoPi * j / nphi;
        dirs.push_back(Eigen::Vector3d(st * std::cos(a), st * std::sin(a), ct));
        dw.push_back(rt.weights(t) * kTwoPi / nphi);
      }
  }

  AmbientQuadrature q;
  q.nodes.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dirs.size()) * radial_nodes);
  q.weights.resize(q.nodes.cols());
  Eigen::Index k = 0;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const double curv = phi.value(dirs[d]) - c.offset;
    const double r0 = std::sqrt(std::max(0.0, (lo - c.offset) / curv)), r1 = std::sqrt((hi - c.offset) / curv);
    for (int i = 0; i < radial_nodes; ++i, ++k) {
      const double r = r0 + (r1 - r0) * rr.nodes(i);
      q.nodes.col(k) = r * dirs[d];
      q.weights(k) = (r1 - r0) * rr.weights(i) * std::pow(r, static_cast<double>(n - 1)) * dw[d];
    }
  }
  return q;
}

CoareaResult coarea_check(const std::function<double(const Eigen::VectorXd&)>& f, const LambdaGrid& grid,
                          const AmbientQuadrature& ambient) {
  CoareaResult r;
  for (Eigen::Index k = 0; k < ambient.weights.size(); ++k) {
    const Eigen::VectorXd x = ambient.nodes.col(k);
    r.ambient += ambient.weights(k) * f(x) * jacobian_wedge_norm(grid.hamiltonians(), x);
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const LevelSetModel& fib = grid.fiber(k);
    double s = 0.0;
    for (std::size_t i = 0; i < fib.size(); ++i) s += fib.weights()(static_cast<Eigen::Index>(i)) * f(fib.node(i));
    r.fibered += grid.weights()(static_cast<Eigen::Index>(k)) * s;
  }
  r.residual = std::abs(r.ambient - r.fibered);
  return r;
}

Section apply_Txi(const TestFunction& u, const LambdaGrid& grid) {
  if (!u.fourier) throw MissingFourierData("test function has no analytic Fourier transform; configure a DFT box");
  return apply_Tx(u.fourier, grid);
}

DftSection apply_Txi(const ComplexFunction& u, const LambdaGrid& grid, const DftConfig& cfg) {
  if (grid.dimension() != 2) throw MissingFourierData("DFT fallback is available for n = 2 only");
  const DftFourier ft(u, cfg);
  DftSection out{apply_Tx([&](const Eigen::VectorXd& xi) { return ft(xi); }, grid), 0.0};
  for (const auto& f : grid.fibers())
    for (std::size_t i = 0; i < f.size(); ++i)
      out.truncation_estimate = std::max(out.truncation_estimate, ft.error_estimate(f.node(i)));
  return out;
}

FiberRule multiplication_rule(const ComplexFunction& a) {
  return [a](std::size_t, const LevelSetModel& f, const Eigen::VectorXcd& u) -> Eigen::VectorXcd {
    return (f.sample(a).array() * u.array()).matrix();
  };
}

FiberRule momentum_rule(const VectorField& y, double hbar) {
  return [y, hbar](std::size_t, const LevelSetModel& f, const Eigen::VectorXcd& u) { return fiber_JX_apply(y, hbar, f, u); };
}

FiberRule kernel_rule(const PWSymbol& sym, double hbar) {
  return [sym, hbar](std::size_t, const LevelSetModel& f, const Eigen::VectorXcd& u) {
    return kernel_quantize(sym, hbar, f).apply(u);
  };
}

DecomposableOperator::DecomposableOperator(const LambdaGrid& grid, FiberRule rule, double hbar)
    : grid_(&grid), rule_(std::move(rule)), hbar_(hbar) {}

Section DecomposableOperator::apply(const Section& s) const {
  if (s.grid != grid_) throw DimensionMismatch("section lives on a different grid");
  Section out{grid_, {}};
  for (std::size_t k = 0; k < grid_->size(); ++k) {
    const double l = grid_->lambdas()(static_cast<Eigen::Index>(k));
    try {
      if (!rule_) {
        out.values.push_back(Eigen::VectorXcd::Zero(s.values[k].size()));
        continue;
      }
      out.values.push_back(rule_(k, grid_->fiber(k), s.values[k]));
    } catch (const std::exception& e) {
      throw RuleFailure(std::string("fiber rule failed at lambda = ") + format_lambda(l) + ": " + e.what(), l);
    }
    if (out.values.back().size() != s.values[k].size())
      throw RuleFailure("fiber rule returned a vector of the wrong length at lambda = " + format_lambda(l), l);
  }
  return out;
}

DecomposableOperator assemble_Opd(FiberRule rule, const LambdaGrid& grid, double hbar) {
  return DecomposableOperator(grid, std::move(rule), hbar);
}

StrongCommutationResult strong_commutation_check(const VectorField& y, const TestFunction& u, double hbar,
                                                 const LambdaGrid& grid) {
  const CompiledField cy(y);
  for (const auto& f : grid.fibers()) f.require_tangent(cy);
  StrongCommutationResult out;
  out.per_lambda.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const LevelSetModel& f = grid.fiber(k);
    const Eigen::Index m = static_cast<Eigen::Index>(f.size());
    Eigen::VectorXcd lhs(m), tu(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::VectorXd z = f.nodes().col(i);
      const double sr = std::sqrt(f.rho_values()(i));
      lhs(i) = sr * ambient_JY_apply(cy, u, hbar, z);
      tu(i) = sr * u.value(z);
    }
    out.per_lambda(static_cast<Eigen::Index>(k)) = f.norm(lhs - fiber_JX_apply(y, hbar, f, tu));
  }
  out.residual = out.per_lambda.size() ? out.per_lambda.maxCoeff() : 0.0;
  return out;
}

SliceProbe slice_continuity_probe(const std::function<double(const Eigen::VectorXd&)>& h, const LambdaGrid& grid) {
  const Eigen::VectorXd& l = grid.lambdas();
  const Eigen::Index n = l.size();
  if (n < 3) throw std::invalid_argument("slice probe needs at least three lambda nodes");
  const double step = (l(n - 1) - l(0)) / (n - 1);
  for (Eigen::Index k = 0; k < n; ++k)
    if (std::abs(l(k) - (l(0) + k * step)) > 1e-12 * std::max(1.0, std::abs(l(k))))
      throw std::invalid_argument("slice probe needs uniformly spaced lambda nodes");
  SliceProbe p;
  p.lambdas = l;
  p.values.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const LevelSetModel& f = grid.fiber(static_cast<std::size_t>(k));
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.weights()(static_cast<Eigen::Index>(i)) * h(f.node(i));
    p.values(k) = s;
  }
  p.second_differences.resize(n - 2);
  for (Eigen::Index k = 1; k + 1 < n; ++k)
    p.second_differences(k - 1) = (p.values(k + 1) - 2.0 * p.values(k) + p.values(k - 1)) / (step * step);
  p.max_second_difference = p.second_differences.cwiseAbs().maxCoeff();
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index k = 0; k < n; ++k)
    if (p.values(k) != 0.0) {
      if (first < 0) first = k;
      last = k;
    }
  if (first >= 0) {
    p.support_min = l(first);
    p.support_max = l(last);
    p.compact_in_range = first > 0 && last < n - 1;
  }
  return p;
}

SweepResult semiclassical_sweep(const SeparableSymbol& f, const SeparableSymbol& g, const std::vector<double>& hbars,
                                const LevelSetModel& circle, const Eigen::VectorXcd& u) {
  for (std::size_t k = 0; k < hbars.size(); ++k) {
    if (!(hbars[k] > 0.0)) throw std::invalid_argument("hbar values must be positive");
    if (k > 0 && !(hbars[k] < hbars[k - 1])) throw std::invalid_argument("hbar values must decrease");
  }
  const SeparableSymbol fg = separable_product(f, g);
  const SeparableSymbol bracket = separable_bracket(f, g, circle.radius());
  SweepResult out;
  for (double hbar : hbars) {
    const FiberOperator a = kernel_quantize(f, hbar, circle), b = kernel_quantize(g, hbar, circle);
    const FiberOperator c = kernel_quantize(fg, hbar, circle), d = kernel_quantize(bracket, hbar, circle);
    const Eigen::VectorXcd au = a(u), bu = b(u), abu = a(bu), bau = b(au), cu = c(u), du = d(u);
    SweepRow row;
    row.hbar = hbar;
    row.product = circle.norm(abu - cu);
    row.jordan = circle.norm(0.5 * (abu + bau) - cu);
    row.commutator = circle.norm(cd(0.0, 1.0 / hbar) * (abu - bau) - du);
    out.rows.push_back(row);
  }
  auto decreasing = [&](auto member) {
    if (out.rows.size() < 2) return false;
    for (std::size_t k = 1; k < out.rows.size(); ++k)
      if (!(out.rows[k].*member < out.rows[k - 1].*member)) return false;
    return true;
  };
  out.product_decreasing = decreasing(&SweepRow::product);
  out.jordan_decreasing = decreasing(&SweepRow::jordan);
  out.commutator_decreasing = decreasing(&SweepRow::commutator);
  return out;
}

}  // namespace dwc
