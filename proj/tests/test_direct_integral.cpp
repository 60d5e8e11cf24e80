#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dwc/direct_integral.hpp"

using namespace dwc;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

PolySymbol X(std::size_t n, std::size_t a) { return PolySymbol::x(n, a); }

GridConfig full_range(int lambdas, int fibers) {
  GridConfig c;
  c.lambda_min = 1e-8;
  c.lambda_max = 12.0;
  c.lambda_nodes = lambdas;
  c.fiber_nodes = fibers;
  c.spacing = LambdaSpacing::sqrt;
  return c;
}

std::vector<GaussPoly> suite(std::size_t n) {
  std::vector<GaussPoly> out;
  out.push_back(GaussPoly::gaussian(n, 0.5));
  std::vector<int> e1(n, 0), e2(n, 0), e3(n, 0);
  e1[0] = 1;
  e2[0] = 2;
  e2[1] = 1;
  e3[n - 1] = 2;
  out.push_back(GaussPoly(n, 0.6, {{e1, cd(1.0, -0.3)}}));
  out.push_back(GaussPoly(n, 0.8, {{e2, cd(0.5)}, {std::vector<int>(n, 0), cd(0.0, 1.0)}}));
  out.push_back(GaussPoly(n, 0.55, {{e3, cd(-0.7)}, {e1, cd(0.2, 0.2)}}));
  out.push_back(GaussPoly(n, 1.0, {{e1, cd(0.4)}, {e2, cd(0.0, -0.6)}, {e3, cd(1.1)}}));
  return out;
}

double bump(double t, double a, double b) { return t > a && t < b ? std::exp(-1.0 / ((t - a) * (b - t))) : 0.0; }

}  // namespace

TEST(BuildGrid, RadialCircles) {
  const ScalarHamiltonian phi = radial_hamiltonian(2);
  const LambdaGrid g = build_grid(phi, GridConfig{});
  EXPECT_EQ(g.size(), 64u);
  EXPECT_EQ(g.total_nodes(), 64u * 256u);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(g.fiber(k).kind(), FiberKind::circle);
    EXPECT_NEAR(g.fiber(k).radius(), std::sqrt(2.0 * g.lambdas()(static_cast<Eigen::Index>(k))), 1e-14);
  }
  EXPECT_NEAR(g.weights().sum(), 1.5, 1e-13);
  const auto [lo, hi] = g.range();
  EXPECT_EQ(lo, 0.5);
  EXPECT_EQ(hi, 2.0);
}

TEST(BuildGrid, SpheresLinesAndCurves) {
  GridConfig c;
  c.lambda_nodes = 4;
  c.fiber_nodes = 128;
  const LambdaGrid s = build_grid(radial_hamiltonian(3), c);
  EXPECT_EQ(s.fiber(0).kind(), FiberKind::sphere2);
  EXPECT_EQ(s.fiber(0).size(), 8u * 16u);

  const LambdaGrid l = build_grid(ScalarHamiltonian(X(2, 0) + X(2, 1)), c);
  EXPECT_EQ(l.fiber(0).kind(), FiberKind::line);
  EXPECT_TRUE(critical_values(ScalarHamiltonian(X(2, 0) + X(2, 1))).empty());

  const ScalarHamiltonian ellipse(X(2, 0) * X(2, 0) + PolySymbol::constant(2, 2) * X(2, 1) * X(2, 1));
  const LambdaGrid e = build_grid(ellipse, c);
  EXPECT_EQ(e.fiber(3).kind(), FiberKind::implicit_curve);
  for (std::size_t i = 0; i < e.fiber(3).size(); ++i)
    EXPECT_NEAR(ellipse.value(e.fiber(3).node(i)), e.lambdas()(3), 1e-12);
}

TEST(BuildGrid, Errors) {
  GridConfig c;
  c.lambda_min = 0.0;
  c.lambda_max = 1.0;
  EXPECT_THROW(build_grid(radial_hamiltonian(2), c), SingularLevel);
  c.lambda_min = 2.0;
  EXPECT_THROW(build_grid(radial_hamiltonian(2), c), EmptyRange);
  c.lambda_min = -3.0;
  c.lambda_max = -1.0;
  EXPECT_THROW(build_grid(radial_hamiltonian(2), c), EmptyRange);
  const ScalarHamiltonian saddle(X(2, 0) * X(2, 1) + PolySymbol::constant(2, 1));
  ASSERT_EQ(critical_values(saddle).size(), 1u);
  EXPECT_DOUBLE_EQ(critical_values(saddle)[0], 1.0);
  c.lambda_min = 0.5;
  c.lambda_max = 1.5;
  EXPECT_THROW(build_grid(saddle, c), SingularLevel);
}

TEST(Tx, RoundTripAndProbes) {
  GridConfig c;
  c.lambda_nodes = 8;
  c.fiber_nodes = 64;
  const LambdaGrid g = build_grid(radial_hamiltonian(2), c);
  const ComplexFunction u = [](const Eigen::VectorXd& x) { return cd(std::cos(x(0)), x(1) * x(1)); };
  const Section s = apply_Tx(u, g);
  const auto back = apply_Tx_adjoint(s);
  for (std::size_t k = 0; k < g.size(); ++k)
    EXPECT_LT((back[k] - g.fiber(k).sample(u)).cwiseAbs().maxCoeff(), 1e-14);
  const std::vector<Eigen::VectorXd> probes = {g.fiber(2).node(5), g.fiber(7).node(0)};
  const auto vals = apply_Tx_adjoint(s, probes);
  EXPECT_NEAR(std::abs(vals[0] - u(probes[0])), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(vals[1] - u(probes[1])), 0.0, 1e-14);
  EXPECT_THROW(apply_Tx_adjoint(s, {Eigen::Vector2d(0.123, 0.456)}), ProbeOffGrid);
}

TEST(Tx, IntertwinesFunctionsOfTheHamiltonian) {
  GridConfig c;
  c.lambda_nodes = 8;
  c.fiber_nodes = 64;
  const ScalarHamiltonian phi = radial_hamiltonian(2);
  const LambdaGrid g = build_grid(phi, c);
  const ComplexFunction u = [](const Eigen::VectorXd& x) { return cd(x(0), std::exp(-x(1))); };
  const auto b = [](double l) { return cd(std::sin(l), l * l); };
  const Section lhs = apply_Tx([&](const Eigen::VectorXd& x) { return b(phi.value(x)) * u(x); }, g);
  const Section rhs = apply_Tx(u, g).multiply_by_lambda(b);
  EXPECT_LT((lhs - rhs).norm(), 1e-13 * rhs.norm());
}

TEST(Coarea, GaussianWeightedByGradient) {
  const LambdaGrid g = build_grid(radial_hamiltonian(2), full_range(200, 256));
  const auto f = [](const Eigen::VectorXd& x) { return std::exp(-x.squaredNorm()); };
  const CoareaResult r = coarea_check(f, g, matched_shell(g, 200, 256));
  EXPECT_LT(r.residual, 1e-8);
  // The fibered side alone, against the closed form over the whole plane.
  EXPECT_NEAR(r.fibered, std::pow(kPi, 1.5) / 2.0, 1e-8);
}

TEST(Coarea, EllipseAgainstPolarQuadrature) {
  const ScalarHamiltonian phi(X(2, 0) * X(2, 0) * GaussianRational::fraction(1, 2) + X(2, 1) * X(2, 1));
  GridConfig c;
  c.lambda_min = 0.2;
  c.lambda_max = 1.5;
  c.lambda_nodes = 48;
  c.fiber_nodes = 256;
  const LambdaGrid g = build_grid(phi, c);
  const auto f = [](const Eigen::VectorXd& x) { return std::exp(-x.squaredNorm()) * (1.0 + x(0)); };
  const CoareaResult r = coarea_check(f, g, matched_shell(g, 48, 256));
  EXPECT_LT(r.residual, 1e-10 * std::abs(r.ambient));
}

TEST(Tx, UnitarityOnGaussianPolynomials) {
  for (std::size_t n : {2u, 3u}) {
    GridConfig c = full_range(64, n == 2 ? 128 : 512);
    c.lambda_min = 1e-16;
    c.lambda_max = 25.0;
    const LambdaGrid g = build_grid(radial_hamiltonian(n), c);
    for (const GaussPoly& u : suite(n)) {
      const TestFunction t = u.as_test_function();
      const double norm = apply_Tx(t, g).norm();
      EXPECT_NEAR(norm / *t.analytic_l2_norm, 1.0, 1e-9) << "n = " << n;
    }
  }
}

TEST(Txi, SelfDualGaussianAndKineticIntertwining) {
  GridConfig c;
  c.lambda_nodes = 12;
  c.fiber_nodes = 64;
  const ScalarHamiltonian phi = radial_hamiltonian(2);
  const LambdaGrid g = build_grid(phi, c);
  const GaussPoly gauss = GaussPoly::gaussian(2, 0.5);
  EXPECT_LT((apply_Txi(gauss.as_test_function(), g) - apply_Tx(gauss.as_test_function(), g)).norm(), 1e-14);

  const GaussPoly u = GaussPoly(2, 0.7, {{{1, 2}, cd(1.0, 0.2)}, {{0, 0}, cd(0.3)}});
  const Section kinetic = apply_Txi(u.laplacian().scaled(-0.5).as_test_function(), g);
  const Section rhs = apply_Txi(u.as_test_function(), g).multiply_by_lambda([](double l) { return cd(l); });
  EXPECT_LT((kinetic - rhs).norm(), 1e-12 * rhs.norm());

  EXPECT_THROW(apply_Txi(TestFunction{[](const Eigen::VectorXd&) { return cd(1.0); }, {}, {}, {}}, g),
               MissingFourierData);
  const DftSection dft = apply_Txi([&](const Eigen::VectorXd& x) { return u.value(x); }, g, DftConfig{});
  const double err = (dft.section - apply_Txi(u.as_test_function(), g)).norm();
  EXPECT_LT(err, 1e-9);
  EXPECT_LT(dft.truncation_estimate, 1e-6);
}

TEST(Opd, CommutesWithLambdaMultiplication) {
  GridConfig c;
  c.lambda_nodes = 6;
  c.fiber_nodes = 48;
  const LambdaGrid g = build_grid(radial_hamiltonian(2), c);
  PWSymbol f;
  f.support_radius = 0.8;
  f.fhat = [](const Eigen::VectorXd& m, const Eigen::VectorXd& v) { return cd(1.0 + m(1), 0.0) * bump(v.norm(), -0.8, 0.8); };
  const Section s = apply_Tx([](const Eigen::VectorXd& x) { return cd(x(0), x(1)); }, g);
  const auto b = [](double l) { return cd(std::cos(3 * l), l); };
  for (const FiberRule& rule : {kernel_rule(f, 0.3), multiplication_rule([](const Eigen::VectorXd& x) { return cd(x(0) * x(1)); }),
                                momentum_rule(VectorField::rotation(0, 1, 2), 0.5)}) {
    const DecomposableOperator op = assemble_Opd(rule, g, 0.3);
    const Section diff = op(s.multiply_by_lambda(b)) - op(s).multiply_by_lambda(b);
    EXPECT_LT(diff.norm(), 1e-12 * std::max(1.0, op(s).norm()));
  }
  const FiberRule bad = [](std::size_t k, const LevelSetModel&, const Eigen::VectorXcd& u) -> Eigen::VectorXcd {
    if (k == 4) throw std::runtime_error("no");
    return u;
  };
  try {
    assemble_Opd(bad, g, 0.3)(s);
    FAIL();
  } catch (const RuleFailure& e) {
    EXPECT_EQ(e.lambda(), g.lambdas()(4));
  }
}

TEST(StrongCommutation, RotationsAndEllipse) {
  GridConfig c;
  c.lambda_nodes = 8;
  c.fiber_nodes = 128;
  const TestFunction u2 = GaussPoly(2, 0.5, {{{1, 0}, cd(1.0)}, {{0, 2}, cd(0.0, 0.4)}}).as_test_function();
  const StrongCommutationResult r2 =
      strong_commutation_check(VectorField::rotation(0, 1, 2), u2, 0.7, build_grid(radial_hamiltonian(2), c));
  EXPECT_LT(r2.residual, 1e-10);

  const TestFunction u3 = GaussPoly(3, 0.5, {{{1, 0, 1}, cd(1.0)}, {{0, 0, 0}, cd(0.2)}}).as_test_function();
  for (auto [i, j] : {std::pair{0u, 1u}, std::pair{1u, 2u}}) {
    const StrongCommutationResult r3 =
        strong_commutation_check(VectorField::rotation(i, j, 3), u3, 0.7, build_grid(radial_hamiltonian(3), c));
    EXPECT_LT(r3.residual, 1e-10);
  }

  // Hamiltonian field of the ellipse phi = x1^2 + 2 x2^2.
  const ScalarHamiltonian ellipse(X(2, 0) * X(2, 0) + PolySymbol::constant(2, 2) * X(2, 1) * X(2, 1));
  const VectorField y({PolySymbol::constant(2, 4) * X(2, 1), PolySymbol::constant(2, -2) * X(2, 0)});
  const StrongCommutationResult re = strong_commutation_check(y, u2, 0.7, build_grid(ellipse, c));
  EXPECT_LT(re.residual, 1e-8);
  EXPECT_EQ(re.per_lambda.size(), 8);

  const VectorField radial({X(2, 0), X(2, 1)});
  EXPECT_THROW(strong_commutation_check(radial, u2, 0.7, build_grid(radial_hamiltonian(2), c)), NotTangent);
}

TEST(SliceProbe, AnnulusBumpMatchesAnalyticCurvature) {
  GridConfig c;
  c.lambda_min = 0.1;
  c.lambda_max = 4.0;
  c.lambda_nodes = 391;
  c.fiber_nodes = 64;
  c.spacing = LambdaSpacing::uniform;
  const ScalarHamiltonian phi = radial_hamiltonian(2);
  const LambdaGrid g = build_grid(phi, c);
  const double a = 0.5, b = 2.0;
  const SliceProbe p = slice_continuity_probe([&](const Eigen::VectorXd& x) { return bump(phi.value(x), a, b); }, g);
  EXPECT_TRUE(p.compact_in_range);
  EXPECT_GE(p.support_min, a);
  EXPECT_LE(p.support_max, b);

  // F = s * beta with s = 2 pi sqrt(2 lambda) the circumference and beta the bump.
  double worst = 0.0;
  for (Eigen::Index k = 1; k + 1 < p.lambdas.size(); ++k) {
    const double l = p.lambdas(k);
    double f2 = 0.0;
    if (l > a && l < b) {
      const double q = (l - a) * (b - l), dq = a + b - 2 * l;
      const double d1 = dq / (q * q), d2 = (-2.0 * q - 2.0 * dq * dq) / (q * q * q);
      const double beta = bump(l, a, b), beta1 = beta * d1, beta2 = beta * (d2 + d1 * d1);
      const double s = 2 * kPi * std::sqrt(2 * l), s1 = 2 * kPi / std::sqrt(2 * l), s2 = -2 * kPi / std::pow(2 * l, 1.5);
      f2 = s2 * beta + 2 * s1 * beta1 + s * beta2;
    }
    worst = std::max(worst, std::abs(p.second_differences(k - 1) - f2));
  }
  EXPECT_LT(worst, 1e-2 * p.max_second_difference);

  c.spacing = LambdaSpacing::gauss_legendre;
  EXPECT_THROW(slice_continuity_probe([](const Eigen::VectorXd&) { return 1.0; }, build_grid(phi, c)), std::invalid_argument);
}

TEST(Sweep, ErrorsDecreaseWithHbar) {
  const LevelSetModel circle = LevelSetModel::circle(1.0, 256);
  SeparableSymbol f, g;
  f.terms.push_back({[](double t) { return cd(1.0 + 0.5 * std::cos(t)); }, [](double t) { return cd(-0.5 * std::sin(t)); },
                     bump_vertical(1.0)});
  g.terms.push_back({[](double t) { return cd(std::sin(2 * t)); }, [](double t) { return cd(2 * std::cos(2 * t)); },
                     bump_vertical(1.0)});
  const Eigen::VectorXcd u = circle.sample([](const Eigen::VectorXd& x) { return cd(std::exp(x(0)), 0.3 * x(1)); });
  const SweepResult r = semiclassical_sweep(f, g, {0.5, 0.25, 0.125}, circle, u);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_TRUE(r.product_decreasing);
  EXPECT_TRUE(r.jordan_decreasing);
  EXPECT_TRUE(r.commutator_decreasing);

  SeparableSymbol zero;
  zero.terms.push_back({[](double) { return cd(0.0); }, [](double) { return cd(0.0); }, bump_vertical(1.0)});
  for (const SweepRow& row : semiclassical_sweep(zero, zero, {0.5, 0.25}, circle, u).rows) {
    EXPECT_EQ(row.product, 0.0);
    EXPECT_EQ(row.jordan, 0.0);
    EXPECT_EQ(row.commutator, 0.0);
  }
  EXPECT_THROW(semiclassical_sweep(f, g, {0.25, 0.5}, circle, u), std::invalid_argument);
}
