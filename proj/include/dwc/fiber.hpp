#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

#include "dwc/geometry.hpp"
#include "dwc/spectral.hpp"

namespace dwc {

class ParametrizationUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FiberKind { circle, sphere2, implicit_curve, line };

const char* to_string(FiberKind kind);

/// Discretized level set {phi = lambda} with quadrature for its Riemannian volume.
/// Immutable after construction.
class LevelSetModel {
 public:
  /// Circle of the given radius about 0, equispaced in angle starting on the positive x1 axis.
  static LevelSetModel circle(double radius, int nodes);
  static LevelSetModel circle(const ScalarHamiltonian& phi, double radius, int nodes);
  /// 2-sphere about 0 on a Gauss-Legendre(cos theta) x uniform azimuth grid.
  static LevelSetModel sphere2(double radius, int n_theta, int n_phi);
  static LevelSetModel sphere2(const ScalarHamiltonian& phi, double radius, int n_theta, int n_phi);
  /// Closed planar curve star-shaped about 0, traced by predictor-corrector continuation in
  /// arc length; nodes are equispaced in arc length.
  static LevelSetModel implicit_curve(const ScalarHamiltonian& phi, double level, int nodes, int substeps = 8);
  /// Level line of an affine phi on the plane, truncated to |t| <= half_width along the line.
  static LevelSetModel line(const ScalarHamiltonian& phi, double level, double half_width, int nodes);

  FiberKind kind() const { return kind_; }
  std::size_t dimension() const { return static_cast<std::size_t>(nodes_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(nodes_.cols()); }
  const Hamiltonians& hamiltonians() const { return hams_; }
  const ScalarHamiltonian& hamiltonian() const { return hams_.front(); }
  double level() const { return level_; }
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  Eigen::VectorXd node(std::size_t i) const { return nodes_.col(static_cast<Eigen::Index>(i)); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& rho_values() const { return rho_; }
  double volume() const { return weights_.sum(); }
  /// Radius for circles and spheres; 0 otherwise.
  double radius() const { return radius_; }
  /// Curve length (circles, implicit curves) or truncated line length.
  double length() const { return length_; }
  const SphereSpectral& sphere_grid() const;

  /// Unit tangent at node i of a planar curve, in the traversal direction.
  Eigen::VectorXd unit_tangent(std::size_t i) const;

  Eigen::VectorXcd sample(const std::function<std::complex<double>(const Eigen::VectorXd&)>& f) const;
  std::complex<double> inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;
  double norm(const Eigen::VectorXcd& u) const;

  /// X^lambda u at the nodes: spectral on closed fibers, Lagrange on lines.
  Eigen::VectorXcd tangent_derivative(const CompiledField& x, const Eigen::VectorXcd& u) const;
  /// Dense matrix of u -> X^lambda u.
  Eigen::MatrixXcd tangent_derivative_matrix(const CompiledField& x) const;
  /// div X^lambda at every node from the Hessian closed form; throws NotTangent.
  Eigen::VectorXd induced_divergence(const CompiledField& x, double tangency_tolerance = kTangencyTolerance) const;
  void require_tangent(const CompiledField& x, double tolerance = kTangencyTolerance) const;

 private:
  LevelSetModel() = default;
  void finish(double node_tolerance);

  FiberKind kind_ = FiberKind::circle;
  Hamiltonians hams_;
  double level_ = 0.0;
  Eigen::MatrixXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd rho_;
  double radius_ = 0.0;
  double length_ = 0.0;
  Eigen::MatrixXd tangents_;       // curves and lines
  Eigen::VectorXd line_params_;    // lines
  std::shared_ptr<const SphereSpectral> sphere_;
  std::shared_ptr<const Eigen::MatrixXd> line_diff_;
};

/// Divergence of the induced field at node i, by central differences in a chart:
/// stereographic from the antipode on spheres and circles, the radial graph on implicit curves,
/// the affine parameter on lines.
double intrinsic_divergence_fd(const VectorField& y, const LevelSetModel& model, std::size_t i, double step = 1e-4);

}  // namespace dwc
