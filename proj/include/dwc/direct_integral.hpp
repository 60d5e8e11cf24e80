#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dwc/fiber.hpp"
#include "dwc/gauss_poly.hpp"
#include "dwc/quantization.hpp"

namespace dwc {

class SingularLevel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProbeOffGrid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingFourierData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RuleFailure : public std::runtime_error {
 public:
  RuleFailure(const std::string& what, double lambda) : std::runtime_error(what), lambda_(lambda) {}
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

using ComplexFunction = std::function<std::complex<double>(const Eigen::VectorXd&)>;

enum class LambdaSpacing { gauss_legendre, sqrt, uniform };

/// gauss_legendre: Gauss-Legendre in lambda. sqrt: Gauss-Legendre in s with lambda = c + s^2,
/// c the critical value below the range (clusters nodes where fibers shrink). uniform: equispaced
/// nodes with trapezoid weights, for divided-difference probes.
struct GridConfig {
  double lambda_min = 0.5;
  double lambda_max = 2.0;
  int lambda_nodes = 64;
  int fiber_nodes = 256;
  LambdaSpacing spacing = LambdaSpacing::gauss_legendre;
  double line_half_width = 8.0;
  int continuation_substeps = 8;
};

/// Critical values of a Hamiltonian of degree <= 2 (solutions of Hess x = -grad phi(0)).
std::vector<double> critical_values(const ScalarHamiltonian& phi);

class LambdaGrid {
 public:
  /// range is the integration interval; it defaults to the span of the nodes.
  LambdaGrid(Hamiltonians h, Eigen::VectorXd lambdas, Eigen::VectorXd weights, std::vector<LevelSetModel> fibers,
             std::optional<std::pair<double, double>> range = std::nullopt);

  const Hamiltonians& hamiltonians() const { return hams_; }
  std::size_t dimension() const { return hams_.front().dimension(); }
  std::size_t size() const { return fibers_.size(); }
  std::size_t total_nodes() const;
  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const LevelSetModel& fiber(std::size_t k) const { return fibers_[k]; }
  const std::vector<LevelSetModel>& fibers() const { return fibers_; }
  std::pair<double, double> range() const { return range_; }

 private:
  Hamiltonians hams_;
  Eigen::VectorXd lambdas_, weights_;
  std::vector<LevelSetModel> fibers_;
  std::pair<double, double> range_;
};

/// Circles (n = 2) and spheres (n = 3) for radial phi, continuation curves for other planar
/// quadratics, lines for affine planar phi.
LambdaGrid build_grid(const ScalarHamiltonian& phi, const GridConfig& cfg);

/// Element of the discretized direct integral: one vector of node values per lambda.
struct Section {
  const LambdaGrid* grid = nullptr;
  std::vector<Eigen::VectorXcd> values;

  double squared_norm() const;
  double norm() const { return std::sqrt(squared_norm()); }
  std::complex<double> inner(const Section& other) const;
  Section operator-(const Section& other) const;
  /// Fiberwise multiplication by b(lambda).
  Section multiply_by_lambda(const std::function<std::complex<double>(double)>& b) const;
};

Section zero_section(const LambdaGrid& grid);

/// [T_x u](lambda)(z) = rho(z)^(1/2) u(z).
Section apply_Tx(const ComplexFunction& u, const LambdaGrid& grid);
Section apply_Tx(const TestFunction& u, const LambdaGrid& grid);

/// rho^(-1/2) s at every node.
std::vector<Eigen::VectorXcd> apply_Tx_adjoint(const Section& s);
/// rho^(-1/2) s(lambda(x))(x) at probe points snapped to grid nodes.
std::vector<std::complex<double>> apply_Tx_adjoint(const Section& s, const std::vector<Eigen::VectorXd>& probes,
                                                   double snap_tolerance = 1e-9);

struct AmbientQuadrature {
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;

  /// Shell r_min <= |x| <= r_max; Gauss-Legendre in r, trapezoid in angle (n = 2) or
  /// Gauss-Legendre in cos theta times trapezoid in azimuth (n = 3).
  static AmbientQuadrature shell(std::size_t n, double r_min, double r_max, int radial_nodes, int angular_nodes);
  /// Tensor Gauss-Legendre on [-L, L]^n.
  static AmbientQuadrature box(std::size_t n, double half_width, int nodes_per_axis);
};

/// Polar quadrature of the region lambda_min <= phi <= lambda_max, for phi a positive definite
/// quadratic centred at the origin (radial or not). Each direction gets its own radial interval.
AmbientQuadrature matched_shell(const LambdaGrid& grid, int radial_nodes, int angular_nodes);

struct CoareaResult {
  double ambient = 0.0;
  double fibered = 0.0;
  double residual = 0.0;
};

/// |int f |wedge DJ| dx - sum_lambda w_lambda int_fiber f|.
CoareaResult coarea_check(const std::function<double(const Eigen::VectorXd&)>& f, const LambdaGrid& grid,
                          const AmbientQuadrature& ambient);

/// T_x applied to the Fourier transform; the grid lives in frequency space.
Section apply_Txi(const TestFunction& u, const LambdaGrid& grid);

struct DftSection {
  Section section;
  double truncation_estimate = 0.0;
};
DftSection apply_Txi(const ComplexFunction& u, const LambdaGrid& grid, const DftConfig& cfg);

/// Per-lambda action of a fiber operator.
using FiberRule = std::function<Eigen::VectorXcd(std::size_t k, const LevelSetModel& fiber, const Eigen::VectorXcd& u)>;

FiberRule multiplication_rule(const ComplexFunction& a);
FiberRule momentum_rule(const VectorField& y, double hbar);
FiberRule kernel_rule(const PWSymbol& f, double hbar);

/// Op^d: acts fiberwise, so it commutes with every lambda-multiplication.
class DecomposableOperator {
 public:
  DecomposableOperator(const LambdaGrid& grid, FiberRule rule, double hbar);
  Section apply(const Section& s) const;
  Section operator()(const Section& s) const { return apply(s); }
  double hbar() const { return hbar_; }

 private:
  const LambdaGrid* grid_;
  FiberRule rule_;
  double hbar_;
};

DecomposableOperator assemble_Opd(FiberRule rule, const LambdaGrid& grid, double hbar);

struct StrongCommutationResult {
  double residual = 0.0;
  Eigen::VectorXd per_lambda;
};

/// max over lambda of || T_x(J_Y u)(lambda) - J_{Y^lambda} T_x u(lambda) ||_lambda.
StrongCommutationResult strong_commutation_check(const VectorField& y, const TestFunction& u, double hbar,
                                                 const LambdaGrid& grid);

struct SliceProbe {
  Eigen::VectorXd lambdas;
  Eigen::VectorXd values;
  Eigen::VectorXd second_differences;  // at interior nodes
  double max_second_difference = 0.0;
  double support_min = 0.0, support_max = 0.0;  // lambda range where |F| > 0
  bool compact_in_range = false;
};

/// F(lambda) = int_fiber h on a uniformly spaced grid, with second divided differences.
SliceProbe slice_continuity_probe(const std::function<double(const Eigen::VectorXd&)>& h, const LambdaGrid& grid);

struct SweepRow {
  double hbar = 0.0;
  double product = 0.0;
  double jordan = 0.0;
  double commutator = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool product_decreasing = false;
  bool jordan_decreasing = false;
  bool commutator_decreasing = false;
};

/// For each hbar: |(A B - C) u|, |((A B + B A)/2 - C) u| and |((i/hbar)[A, B] - D) u| with
/// A, B, C, D the quantizations of f, g, f g and {f, g} on a circle fiber.
SweepResult semiclassical_sweep(const SeparableSymbol& f, const SeparableSymbol& g, const std::vector<double>& hbars,
                                const LevelSetModel& circle, const Eigen::VectorXcd& u);

}  // namespace dwc
