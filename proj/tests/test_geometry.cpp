#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dwc/geometry.hpp"

using namespace dwc;

namespace {

PolySymbol X(std::size_t n, std::size_t a) { return PolySymbol::x(n, a); }
GaussianRational q(long a, long b = 1) { return GaussianRational::fraction(a, b); }

ScalarHamiltonian ellipse() { return ScalarHamiltonian((X(2, 0) * X(2, 0) + X(2, 1) * X(2, 1) * q(2)) * q(1, 2)); }
VectorField ellipse_field() { return VectorField({X(2, 1) * q(-2), X(2, 0)}); }

TestFunction gaussian_times_linear() {
  // u = (1 + 2 x1 + 3 x2) exp(-|x|^2), gradient by hand.
  TestFunction u;
  u.value = [](const Eigen::VectorXd& x) {
    return std::complex<double>((1 + 2 * x(0) + 3 * x(1)) * std::exp(-x.squaredNorm()));
  };
  u.gradient = [](const Eigen::VectorXd& x) {
    const double e = std::exp(-x.squaredNorm()), p = 1 + 2 * x(0) + 3 * x(1);
    Eigen::VectorXcd g(2);
    g(0) = (2 - 2 * x(0) * p) * e;
    g(1) = (3 - 2 * x(1) * p) * e;
    return g;
  };
  return u;
}

}  // namespace

TEST(WedgeNorm, Examples) {
  const Hamiltonians radial{radial_hamiltonian(2)};
  EXPECT_DOUBLE_EQ(jacobian_wedge_norm(radial, Eigen::Vector2d(3, 4)), 5.0);
  EXPECT_EQ(jacobian_wedge_norm(radial, Eigen::Vector2d(0, 0)), 0.0);
  const Hamiltonians coords{ScalarHamiltonian(X(2, 0)), ScalarHamiltonian(X(2, 1))};
  EXPECT_DOUBLE_EQ(jacobian_wedge_norm(coords, Eigen::Vector2d(0.3, -7)), 1.0);
}

TEST(Rho, ExamplesAndSingularity) {
  const Hamiltonians radial{radial_hamiltonian(2)};
  EXPECT_DOUBLE_EQ(rho(radial, Eigen::Vector2d(3, 4)), 0.2);
  EXPECT_DOUBLE_EQ(rho({ScalarHamiltonian(X(2, 0))}, Eigen::Vector2d(-2, 5)), 1.0);
  EXPECT_THROW(rho(radial, Eigen::Vector2d(0, 0)), SingularPoint);
  EXPECT_THROW(rho(radial, Eigen::Vector2d(1e-9, 0)), SingularPoint);
}

TEST(ProjectQx, ExamplesAndProperties) {
  const Hamiltonians radial{radial_hamiltonian(2)};
  const Eigen::VectorXd p = project_qx(radial, Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 3));
  EXPECT_NEAR(p(0), 0.0, 1e-15);
  EXPECT_NEAR(p(1), 3.0, 1e-15);

  const Hamiltonians two{radial_hamiltonian(3), ScalarHamiltonian(X(3, 2) * X(3, 0) + X(3, 1))};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(3), xi(3), eta(3), s(2);
    for (int a = 0; a < 3; ++a) x(a) = nd(rng), xi(a) = nd(rng), eta(a) = nd(rng);
    s << nd(rng), nd(rng);
    const Eigen::VectorXd qxi = project_qx(two, x, xi);
    EXPECT_LT((project_qx(two, x, qxi) - qxi).norm(), 1e-12 * (1 + xi.norm()));
    EXPECT_NEAR(qxi.dot(eta), xi.dot(project_qx(two, x, eta)), 1e-12 * (1 + xi.norm() * eta.norm()));
    EXPECT_LT((project_qx(two, x, flow_shift(two, x, xi, s)) - qxi).norm(), 1e-12 * (1 + xi.norm() + s.norm()));
    for (const auto& h : two) {
      EXPECT_LT(project_qx(two, x, h.gradient(x)).norm(), 1e-12 * (1 + x.norm()));
      EXPECT_NEAR(qxi.dot(h.gradient(x)), 0.0, 1e-12 * (1 + xi.norm() * x.norm()));
    }
  }
  EXPECT_THROW(project_qx(radial, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)), SingularPoint);
}

TEST(Tangency, Examples) {
  const Hamiltonians radial{radial_hamiltonian(2)};
  const VectorField rot = VectorField::rotation(0, 1, 2);
  EXPECT_EQ(tangency_residual(rot, radial, Eigen::Vector2d(0.3, -1.7)), 0.0);
  EXPECT_EQ(tangency_residual(VectorField({X(2, 0), X(2, 1)}), radial, Eigen::Vector2d(1, 0)), 1.0);
  EXPECT_EQ(tangency_residual(VectorField::zero(2), radial, Eigen::Vector2d(1, 5)), 0.0);
}

TEST(AmbientJY, Examples) {
  const TestFunction u = gaussian_times_linear();
  const double hbar = 0.3;
  const Eigen::Vector2d x(1, 0);
  const std::complex<double> rot = ambient_JY_apply(VectorField::rotation(0, 1, 2), u, hbar, x);
  EXPECT_LT(std::abs(rot - std::complex<double>(0, -hbar) * u.gradient(x)(1)), 1e-15);
  EXPECT_EQ(ambient_JY_apply(VectorField::zero(2), u, hbar, x), std::complex<double>(0.0));
  TestFunction c;
  c.value = [](const Eigen::VectorXd&) { return std::complex<double>(2.5, 0.0); };
  c.gradient = [](const Eigen::VectorXd& x) { return Eigen::VectorXcd::Zero(x.size()).eval(); };
  EXPECT_LT(std::abs(ambient_JY_apply(VectorField({X(2, 0), X(2, 1)}), c, hbar, Eigen::Vector2d(0.4, 0.1)) -
                     std::complex<double>(0, -hbar * 2.5)), 1e-15);
}

TEST(TestFunctionPlumbing, GradientConsistency) {
  std::vector<Eigen::VectorXd> probes{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(-1.0, 0.5), Eigen::Vector2d(0.7, -0.3)};
  EXPECT_LT(gradient_consistency(gaussian_times_linear(), probes), 1e-6);
}

TEST(InducedDivergence, RadialAntisymmetricLinearKeepsAmbientDivergence) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> coef(-4, 4);
  for (std::size_t n : {2u, 3u}) {
    const ScalarHamiltonian phi = radial_hamiltonian(n);
    std::vector<std::vector<long>> a(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) a[i][j] = coef(rng), a[j][i] = -a[i][j];
    const VectorField y = VectorField::linear(a);
    std::vector<mpq_class> z;
    for (std::size_t a = 0; a < n; ++a) z.emplace_back(static_cast<long>(3 * a + 1), 7);
    const std::vector<mpq_class> none(n, 0);
    EXPECT_EQ(induced_divergence_exact(y, phi, z), evaluate_exact(y.divergence(), z, none, 0).re());
    Eigen::VectorXd zd = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 0.3, 1.1);
    EXPECT_NEAR(induced_divergence(y, phi, zd), 0.0, 1e-14);
  }
}

TEST(InducedDivergence, EllipseHandValue) {
  const ScalarHamiltonian phi = ellipse();
  for (double t : {0.1, 0.9, 2.0, 4.4}) {
    const Eigen::Vector2d z(std::cos(t), std::sin(t) / std::sqrt(2.0));
    const double expected = 2 * z(0) * z(1) / (z(0) * z(0) + 4 * z(1) * z(1));
    EXPECT_NEAR(induced_divergence(ellipse_field(), phi, z), expected, 1e-14);
  }
  EXPECT_EQ(induced_divergence(VectorField::zero(2), phi, Eigen::Vector2d(1, 0)), 0.0);
  const std::vector<mpq_class> z1{mpq_class(1), mpq_class(0)}, z2{mpq_class(0), mpq_class(1, 2)};
  EXPECT_EQ(induced_divergence_exact(ellipse_field(), phi, z1), 0);
  EXPECT_EQ(induced_divergence_exact(ellipse_field(), phi, z2), 0);
  const std::vector<mpq_class> z3{mpq_class(1, 3), mpq_class(2, 3)};
  EXPECT_EQ(induced_divergence_exact(ellipse_field(), phi, z3), mpq_class(2 * 2, 9) / mpq_class(1 + 16, 9));
  EXPECT_THROW(induced_divergence(VectorField({X(2, 0), X(2, 1)}), phi, Eigen::Vector2d(1, 0)), NotTangent);
  EXPECT_THROW(induced_divergence(ellipse_field(), phi, Eigen::Vector2d(0, 0)), SingularPoint);
}

TEST(InducedDivergence, GeneralFormAgreesWithHessianFormForOneHamiltonian) {
  const ScalarHamiltonian phi = ellipse();
  const CompiledField y(ellipse_field());
  for (double t = 0.05; t < 6.2; t += 0.3) {
    const Eigen::Vector2d z(std::cos(t), std::sin(t) / std::sqrt(2.0));
    EXPECT_NEAR(induced_divergence(y, Hamiltonians{phi}, z), induced_divergence(y, phi, z), 1e-12);
  }
}

TEST(InducedDivergence, LogRhoDerivativeMatchesFiniteDifference) {
  const Hamiltonians two{ScalarHamiltonian(X(3, 0) * X(3, 0) * X(3, 1) + X(3, 2) * X(3, 2)),
                         ScalarHamiltonian(X(3, 0) + X(3, 1) * X(3, 2) * X(3, 2))};
  std::mt19937_64 rng(9);
  const VectorField y = random_field(3, 2, 3, rng);
  const CompiledField cy(y);
  const Eigen::Vector3d z(0.4, -0.8, 1.1);
  const double h = 1e-6;
  const Eigen::VectorXd dir = cy(z);
  const double fd = (std::log(rho(two, z + h * dir)) - std::log(rho(two, z - h * dir))) / (2 * h);
  EXPECT_NEAR(log_rho_derivative(cy, two, z), fd, 1e-7);
}

TEST(InducedDivergence, RotationAboutAxisOnCirclesOfTwoHamiltonians) {
  const Hamiltonians two{radial_hamiltonian(3), ScalarHamiltonian(X(3, 2))};
  const CompiledField rot(VectorField::rotation(0, 1, 3));
  EXPECT_NEAR(induced_divergence(rot, two, Eigen::Vector3d(0.6, 0.8, 2.0)), 0.0, 1e-14);
  EXPECT_THROW(induced_divergence(CompiledField(VectorField::rotation(0, 2, 3)), two, Eigen::Vector3d(0.6, 0.8, 2.0)),
               NotTangent);
}

TEST(MomentMap, Examples) {
  const std::vector<VectorField> gens{VectorField::rotation(0, 1, 2)};
  const Eigen::Vector2d x(0.7, -1.2), xi(2.0, 0.5);
  const Eigen::VectorXd j = moment_map_eval(gens, x, xi);
  EXPECT_NEAR(j(0), std::real(evaluate(angular_momentum(0, 1, 2), x, xi, 0.0)), 1e-15);
  EXPECT_EQ(moment_map_eval(gens, x, Eigen::Vector2d::Zero())(0), 0.0);
  const Hamiltonians radial{radial_hamiltonian(2)};
  for (double t : {-3.0, 0.5, 11.0})
    EXPECT_NEAR(moment_map_eval(gens, x, flow_shift(radial, x, xi, Eigen::VectorXd::Constant(1, t)))(0), j(0), 1e-13);
}
