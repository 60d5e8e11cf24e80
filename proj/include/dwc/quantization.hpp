#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dwc/fiber.hpp"

namespace dwc {

class AntipodalPair : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StepSizeBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MidpointPair {
  Eigen::VectorXd midpoint;
  Eigen::VectorXd tangent;
};

/// Inverse of the exponential-type map on the sphere of radius r: the geodesic midpoint of z, w
/// and the tangent vector of length r theta / 2 pointing from w towards z.
MidpointPair midpoint_map(const Eigen::VectorXd& z, const Eigen::VectorXd& w, double r);

/// Symbol given through its vertical Fourier transform fhat(m, v), v tangent at m.
struct PWSymbol {
  std::function<std::complex<double>(const Eigen::VectorXd& m, const Eigen::VectorXd& v)> fhat;
  double support_radius = 0.0;
  /// Optional cutoff; empty means the cutoff is off.
  std::function<double(const Eigen::VectorXd& m, const Eigen::VectorXd& v)> kappa;

  std::complex<double> operator()(const Eigen::VectorXd& m, const Eigen::VectorXd& v) const {
    return v.norm() > support_radius ? std::complex<double>(0.0) : fhat(m, v);
  }
};

/// kappa(m, v) = k1(2 |v| / r): one for angles below inner, zero above outer, smooth between.
std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> make_kappa(double radius, double inner,
                                                                                 double outer);

/// Operator on fiber node values; matrix() already carries the quadrature weights.
class FiberOperator {
 public:
  FiberOperator(const LevelSetModel& fiber, Eigen::MatrixXcd weighted);

  const LevelSetModel& fiber() const { return *fiber_; }
  const Eigen::MatrixXcd& matrix() const { return a_; }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  Eigen::VectorXcd operator()(const Eigen::VectorXcd& u) const { return apply(u); }
  /// max |<Au, v> - <u, Av>| structure: max entry of Q A - (Q A)^*.
  double symmetry_defect() const;

 private:
  const LevelSetModel* fiber_;
  Eigen::MatrixXcd a_;
};

/// K(z, w) = hbar^(1-n) kappa f^(m, v / hbar) with (m, v) = midpoint_map(z, w); antipodal entries zero.
FiberOperator kernel_quantize(const PWSymbol& f, double hbar, const LevelSetModel& fiber);

FiberOperator multiplication_op(const std::function<std::complex<double>(const Eigen::VectorXd&)>& a,
                                const LevelSetModel& fiber);

/// -i hbar (X^lambda u + (div X^lambda) u / 2).
Eigen::VectorXcd fiber_JX_apply(const VectorField& x, double hbar, const LevelSetModel& fiber, const Eigen::VectorXcd& u);
Eigen::MatrixXcd fiber_JX_matrix(const VectorField& x, double hbar, const LevelSetModel& fiber);

struct FlowPoint {
  Eigen::VectorXd point;
  double log_density = 0.0;
};

/// Phi_{-t}(z) and the log Radon-Nikodym density exp(-int div X^lambda), by fixed-step RK4.
FlowPoint flow_back(const CompiledField& x, const LevelSetModel& fiber, const Eigen::VectorXd& z, double t, int steps);

/// sqrt(J) u o Phi_{-t}, i.e. exp(-i t G / hbar) u for the generator G = fiber_JX.
/// u is interpolated spectrally from the node values (circles and spheres).
Eigen::VectorXcd evolve_group(const VectorField& x, double t, double hbar, const LevelSetModel& fiber,
                              const Eigen::VectorXcd& u, int steps = 1024);
Eigen::VectorXcd evolve_group(const VectorField& x, double t, double hbar, const LevelSetModel& fiber,
                              const std::function<std::complex<double>(const Eigen::VectorXd&)>& u, int steps = 1024);

/// Vertical profile on a circle fiber: a function of the signed tangent coordinate.
struct Vertical {
  std::function<std::complex<double>(double)> f;
  double support = 0.0;

  std::complex<double> operator()(double u) const { return std::abs(u) > support ? std::complex<double>(0.0) : f(u); }
};

/// exp(-1 / (1 - (u/R)^2)) on |u| < R.
Vertical bump_vertical(double radius, double height = 1.0);
/// 2 (a * b), the vertical transform of a pointwise product.
Vertical product_vertical(const Vertical& a, const Vertical& b, int nodes = 128);
/// -2 i u a(u), the vertical transform of a momentum derivative.
Vertical momentum_derivative(const Vertical& a);

/// Symbol on T*S^1 written as sum_j base_j(angle) vertical_j.
struct SeparableSymbol {
  struct Term {
    std::function<std::complex<double>(double)> base;
    std::function<std::complex<double>(double)> dbase;  // d base / d angle, may be empty
    Vertical vertical;
  };
  std::vector<Term> terms;

  double support() const;
  PWSymbol as_pw() const;
};

SeparableSymbol separable_product(const SeparableSymbol& f, const SeparableSymbol& g);
/// {f, g} on the circle of the given radius, with d/ds = (1/r) d/d angle.
SeparableSymbol separable_bracket(const SeparableSymbol& f, const SeparableSymbol& g, double radius);

/// kernel_quantize specialised to separable symbols on circle fibers; the vertical factor is
/// evaluated once per node offset.
FiberOperator kernel_quantize(const SeparableSymbol& f, double hbar, const LevelSetModel& circle);

}  // namespace dwc
