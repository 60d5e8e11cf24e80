#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dwc/symbol.hpp"

namespace dwc {

class SingularPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotTangent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kRegularityThreshold = 1e-8;
inline constexpr double kTangencyTolerance = 1e-10;

/// Position-only Hamiltonian phi with exact formal gradient and Hessian.
class ScalarHamiltonian {
 public:
  explicit ScalarHamiltonian(PolySymbol phi);

  std::size_t dimension() const { return phi_.dimension(); }
  const PolySymbol& phi() const { return phi_; }
  const VectorField& gradient_field() const { return grad_; }
  const PolySymbol& hessian_entry(std::size_t a, std::size_t b) const { return hess_[a][b]; }

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

 private:
  PolySymbol phi_;
  VectorField grad_;
  std::vector<std::vector<PolySymbol>> hess_;
  CompiledSymbol value_c_;
  std::vector<CompiledSymbol> grad_c_;
  std::vector<std::vector<CompiledSymbol>> hess_c_;
};

using Hamiltonians = std::vector<ScalarHamiltonian>;

/// |x|^2 / 2.
ScalarHamiltonian radial_hamiltonian(std::size_t n);

/// Numeric evaluation of a position field.
class CompiledField {
 public:
  CompiledField() = default;
  explicit CompiledField(const VectorField& field);

  std::size_t dimension() const { return comps_.size(); }
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  double divergence(const Eigen::VectorXd& x) const { return div_.real(x); }
  /// Jacobian d Y_a / d x_b.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

 private:
  std::vector<CompiledSymbol> comps_;
  std::vector<std::vector<CompiledSymbol>> jac_;
  CompiledSymbol div_;
};

/// sqrt(det G), G the Gram matrix of the gradients at x.
double jacobian_wedge_norm(const Hamiltonians& h, const Eigen::VectorXd& x);

/// 1 / jacobian_wedge_norm; throws SingularPoint below the threshold.
double rho(const Hamiltonians& h, const Eigen::VectorXd& x, double threshold = kRegularityThreshold);

/// Orthogonal projection of xi onto the complement of span{grad phi_j(x)}.
Eigen::VectorXd project_qx(const Hamiltonians& h, const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                           double threshold = kRegularityThreshold);

/// max_j |<Y(x), grad phi_j(x)>|.
double tangency_residual(const VectorField& y, const Hamiltonians& h, const Eigen::VectorXd& x);
double tangency_residual(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& x);

/// Throws NotTangent when the field leaves the level set at x, relative to |Y| |grad phi|.
void require_tangent(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& x,
                     double tolerance = kTangencyTolerance);

struct TestFunction {
  std::function<std::complex<double>(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXcd(const Eigen::VectorXd&)> gradient;
  std::optional<double> analytic_l2_norm;
  /// Unitary Fourier transform, when known in closed form.
  std::function<std::complex<double>(const Eigen::VectorXd&)> fourier;
};

/// Largest relative mismatch between the analytic gradient and central differences at the probes.
double gradient_consistency(const TestFunction& u, const std::vector<Eigen::VectorXd>& probes, double step = 1e-5);

/// -i hbar (Y . grad u + (div Y) u / 2) at x.
std::complex<double> ambient_JY_apply(const CompiledField& y, const TestFunction& u, double hbar,
                                      const Eigen::VectorXd& x);
std::complex<double> ambient_JY_apply(const VectorField& y, const TestFunction& u, double hbar,
                                      const Eigen::VectorXd& x);

/// div Y^lambda for a single Hamiltonian: div Y + <Hess phi Y, grad phi> / |grad phi|^2.
double induced_divergence(const CompiledField& y, const ScalarHamiltonian& phi, const Eigen::VectorXd& z,
                          double tangency_tolerance = kTangencyTolerance);
double induced_divergence(const VectorField& y, const ScalarHamiltonian& phi, const Eigen::VectorXd& z);

/// The Hessian closed form in exact rational arithmetic at a rational point.
mpq_class induced_divergence_exact(const VectorField& y, const ScalarHamiltonian& phi, const std::vector<mpq_class>& z);

/// div Y^lambda for k Hamiltonians: div Y - Y(rho) / rho, with Y(rho) from the Gram matrix derivative.
double induced_divergence(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& z,
                          double tangency_tolerance = kTangencyTolerance);

/// Y(rho) / rho at z.
double log_rho_derivative(const CompiledField& y, const Hamiltonians& h, const Eigen::VectorXd& z);

/// (<xi, X_a(x)>)_a.
Eigen::VectorXd moment_map_eval(const std::vector<VectorField>& generators, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& xi);

/// Flow of the Hamiltonians on phase space: (x, xi) -> (x, xi + sum_j t_j grad phi_j(x)).
Eigen::VectorXd flow_shift(const Hamiltonians& h, const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                           const Eigen::VectorXd& t);

}  // namespace dwc
